#include "copkit/copkit.h"

#include <gtest/gtest.h>

#include <string>

#include "../vendor/json.hpp"

namespace {

using nlohmann::json;

struct InputGuard {
  copkit_input* p = nullptr;
  ~InputGuard() { copkit_input_free(p); }
};
struct ResultGuard {
  copkit_result* p = nullptr;
  ~ResultGuard() { copkit_result_free(p); }
};

TEST(CapiTest, VersionAndDefaults) {
  EXPECT_NE(std::string(copkit_version()), "");
  copkit_options opt;
  copkit_options_default(&opt);
  EXPECT_DOUBLE_EQ(opt.decision_tol, 1e-7);
  EXPECT_GT(opt.sdp_tol, 0);
  EXPECT_EQ(opt.seed, 0u);
}

TEST(CapiTest, ParseAndCheck) {
  InputGuard in;
  ASSERT_EQ(copkit_input_parse("2\n1 -1\n-1 1\n", &in.p), COPKIT_OK);
  EXPECT_EQ(copkit_input_order(in.p), 2u);
  EXPECT_FALSE(copkit_input_is_polynomial(in.p));
  ResultGuard res;
  ASSERT_EQ(copkit_check(in.p, "spn", 0, nullptr, &res.p), COPKIT_OK);
  EXPECT_EQ(copkit_result_decision(res.p), COPKIT_YES);
  const json rep = json::parse(copkit_result_json(res.p));
  EXPECT_EQ(rep["cone"], "spn");
  ASSERT_NE(copkit_result_certificate(res.p), nullptr);

  ResultGuard ver;
  ASSERT_EQ(copkit_verify(copkit_result_certificate(res.p), in.p, &ver.p), COPKIT_OK);
  EXPECT_EQ(copkit_result_decision(ver.p), COPKIT_YES);
}

TEST(CapiTest, CatalogNo) {
  InputGuard in;
  ASSERT_EQ(copkit_input_load("catalog:horn", &in.p), COPKIT_OK);
  ResultGuard res;
  ASSERT_EQ(copkit_check(in.p, "spn", 0, nullptr, &res.p), COPKIT_OK);
  EXPECT_EQ(copkit_result_decision(res.p), COPKIT_NO);
  EXPECT_EQ(copkit_result_certificate(res.p), nullptr);
}

TEST(CapiTest, Errors) {
  copkit_input* in = nullptr;
  EXPECT_EQ(copkit_input_parse("2\n1 2\n", &in), COPKIT_E_ARGUMENT);
  EXPECT_EQ(in, nullptr);
  EXPECT_NE(std::string(copkit_last_error()), "");
  EXPECT_EQ(copkit_input_load("/nonexistent/matrix.txt", &in), COPKIT_E_IO);
  EXPECT_EQ(copkit_input_load(nullptr, &in), COPKIT_E_ARGUMENT);

  InputGuard ok;
  ASSERT_EQ(copkit_input_load("horn", &ok.p), COPKIT_OK);
  copkit_result* res = nullptr;
  EXPECT_EQ(copkit_check(ok.p, "nope", 0, nullptr, &res), COPKIT_E_ARGUMENT);
  EXPECT_EQ(copkit_check(ok.p, "k", 99, nullptr, &res), COPKIT_E_CAP);
  EXPECT_NE(std::string(copkit_last_error()).find("cap"), std::string::npos);
  EXPECT_EQ(copkit_verify("{\"cone\":", ok.p, &res), COPKIT_E_ARGUMENT);
  EXPECT_EQ(res, nullptr);
}

TEST(CapiTest, Graphs) {
  copkit_graph* g = nullptr;
  ASSERT_EQ(copkit_graph_load("petersen", &g), COPKIT_OK);
  ResultGuard rep;
  ASSERT_EQ(copkit_graph_report(g, &rep.p), COPKIT_OK);
  const json r = json::parse(copkit_result_json(rep.p));
  EXPECT_EQ(r["alpha"], 4);
  EXPECT_EQ(r["acritical"], true);
  ResultGuard bound;
  ASSERT_EQ(copkit_bound(g, "zeta", 3, nullptr, &bound.p), COPKIT_OK);
  EXPECT_EQ(json::parse(copkit_result_json(bound.p))["alpha"], 4);
  EXPECT_EQ(copkit_bound(g, "nope", 0, nullptr, &bound.p), COPKIT_E_ARGUMENT);
  copkit_graph_free(g);
  EXPECT_EQ(copkit_graph_load("cycle:x", &g), COPKIT_E_ARGUMENT);
}

}  // namespace
