#include "copkit/copkit.h"

#include <cmath>
#include <filesystem>
#include <json.hpp>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "copkit/bounds.hpp"
#include "copkit/catalog.hpp"
#include "copkit/cones.hpp"
#include "copkit/graphs.hpp"

using nlohmann::json;

struct copkit_input {
  std::optional<copkit::RatMat> matrix;
  std::optional<copkit::Polynomial> polynomial;
  std::string source;
};

struct copkit_graph {
  copkit::Graph graph;
  std::string source;
};

struct copkit_result {
  copkit_decision decision = COPKIT_NONE;
  std::string json;
  std::string certificate;
  bool has_certificate = false;
};

namespace {

thread_local std::string last_error;

copkit_status fail(copkit_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

// Runs f, mapping exceptions to status codes.
template <class F>
copkit_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const std::length_error& e) {
    return fail(COPKIT_E_CAP, e.what());
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    return fail(msg.find("cap") != std::string::npos ? COPKIT_E_CAP : COPKIT_E_ARGUMENT, msg);
  } catch (const std::runtime_error& e) {
    return fail(COPKIT_E_SOLVER, e.what());
  } catch (const std::exception& e) {
    return fail(COPKIT_E_INTERNAL, e.what());
  } catch (...) {
    return fail(COPKIT_E_INTERNAL, "unknown error");
  }
}

copkit::ConeConfig config(const copkit_options* opt) {
  copkit_options o;
  copkit_options_default(&o);
  if (opt) o = *opt;
  if (!(o.decision_tol > 0) || !(o.sdp_tol > 0) || !(o.verify_tol > 0))
    throw std::invalid_argument("tolerances must be positive");
  copkit::ConeConfig cfg;
  cfg.decision_tol = o.decision_tol;
  cfg.verify_tol = o.verify_tol;
  cfg.sdp.tol_gap = o.sdp_tol;
  cfg.sdp.tol_feas = o.sdp_tol;
  cfg.sdp.seed = o.seed;
  cfg.try_rounding = o.try_rounding != 0;
  return cfg;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string number_text(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

copkit_decision to_c(copkit::Decision d) {
  switch (d) {
    case copkit::Decision::Yes: return COPKIT_YES;
    case copkit::Decision::No: return COPKIT_NO;
    case copkit::Decision::Inconclusive: return COPKIT_INCONCLUSIVE;
  }
  return COPKIT_NONE;
}

json vertices(const std::vector<std::size_t>& v) {
  json out = json::array();
  for (auto x : v) out.push_back(x + 1);
  return out;
}

copkit_status finish(copkit_result* r, copkit_result** out) {
  *out = r;
  return COPKIT_OK;
}

}  // namespace

extern "C" {

const char* copkit_last_error(void) { return last_error.c_str(); }

const char* copkit_version(void) { return "0.1.0"; }

void copkit_options_default(copkit_options* opt) {
  if (!opt) return;
  const copkit::ConeConfig cfg;
  opt->decision_tol = cfg.decision_tol;
  opt->sdp_tol = cfg.sdp.tol_gap;
  opt->verify_tol = cfg.verify_tol;
  opt->seed = 0;
  opt->try_rounding = 1;
}

copkit_status copkit_input_load(const char* source, copkit_input** out) {
  if (!source || !out) return fail(COPKIT_E_ARGUMENT, "null argument");
  return guarded([&] {
    auto in = std::make_unique<copkit_input>();
    const std::string src = source;
    in->source = src;
    std::string name;
    if (src.rfind("catalog:", 0) == 0) name = src.substr(8);
    else if (!std::filesystem::exists(src) && src.find('/') == std::string::npos) {
      // Bare catalog names such as "horn" when no such file exists.
      for (const auto& known : copkit::catalog_names()) {
        const std::string base = known.substr(0, known.find(':'));
        if (src == base || src.rfind(base + ":", 0) == 0) name = src;
      }
    }
    if (!name.empty()) {
      copkit::CatalogItem item = copkit::catalog_lookup(name);
      if (item.exact) in->matrix = *item.exact;
      if (item.numeric) in->matrix = copkit::to_rational(*item.numeric);
      if (item.polynomial) in->polynomial = *item.polynomial;
    } else {
      if (!std::filesystem::is_regular_file(src)) return fail(COPKIT_E_IO, "cannot open matrix file: " + src);
      in->matrix = copkit::read_matrix_file(src);
    }
    *out = in.release();
    return COPKIT_OK;
  });
}

copkit_status copkit_input_parse(const char* text, copkit_input** out) {
  if (!text || !out) return fail(COPKIT_E_ARGUMENT, "null argument");
  return guarded([&] {
    auto in = std::make_unique<copkit_input>();
    in->matrix = copkit::parse_matrix(text);
    in->source = "<text>";
    *out = in.release();
    return COPKIT_OK;
  });
}

void copkit_input_free(copkit_input* in) { delete in; }

size_t copkit_input_order(const copkit_input* in) { return in && in->matrix ? in->matrix->size() : 0; }

int copkit_input_is_polynomial(const copkit_input* in) { return in && in->polynomial ? 1 : 0; }

copkit_status copkit_graph_load(const char* source, copkit_graph** out) {
  if (!source || !out) return fail(COPKIT_E_ARGUMENT, "null argument");
  return guarded([&] {
    auto g = std::make_unique<copkit_graph>();
    const std::string src = source;
    g->source = src;
    if (std::filesystem::is_regular_file(src)) {
      g->graph = copkit::read_graph_file(src);
    } else if (src == "petersen" || src.find(':') != std::string::npos) {
      g->graph = copkit::graph_from_generator(src);
    } else {
      return fail(COPKIT_E_IO, "cannot open graph file: " + src);
    }
    *out = g.release();
    return COPKIT_OK;
  });
}

void copkit_graph_free(copkit_graph* g) { delete g; }

copkit_status copkit_check(const copkit_input* in, const char* cone, unsigned r, const copkit_options* opt,
                           copkit_result** out) {
  if (!in || !cone || !out) return fail(COPKIT_E_ARGUMENT, "null argument");
  return guarded([&] {
    using namespace copkit;
    const ConeConfig cfg = config(opt);
    const std::string name = cone;
    Verdict v;
    json rep = {{"cone", name}, {"order", r}, {"source", in->source}};
    if (name == "sos") {
      if (!in->polynomial) return fail(COPKIT_E_ARGUMENT, "cone sos needs a polynomial input (e.g. catalog:motzkin)");
      v = sos_membership(*in->polynomial, cfg);
    } else {
      if (!in->matrix) return fail(COPKIT_E_ARGUMENT, "cone " + name + " needs a matrix input");
      const RatMat& m = *in->matrix;
      if (name == "c") v = c_membership(m, r);
      else if (name == "spn") v = spn_membership(m, cfg);
      else if (name == "k1") v = k1_membership(m, cfg);
      else if (name == "k") v = kr_membership(m, r, cfg);
      else if (name == "q") v = qr_membership(m, r, cfg);
      else if (name == "las") v = las_simplex_membership(m, r, cfg);
      else return fail(COPKIT_E_ARGUMENT, "unknown cone: " + name + " (expected c, spn, k1, k, q, las, sos)");
      rep["matrix_sha"] = matrix_sha(m);
      rep["order_n"] = m.size();
    }
    auto res = std::make_unique<copkit_result>();
    res->decision = to_c(v.decision);
    rep["decision"] = to_string(v.decision);
    rep["margin"] = number_or_null(v.margin);
    rep["margin_text"] = number_text(v.margin);
    rep["solver_status"] = to_string(v.status);
    rep["note"] = v.note;
    if (v.certificate && v.decision == Decision::Yes) {
      rep["certificate_scalars"] = v.certificate->exact ? "rational" : "float";
      res->certificate = certificate_to_json(*v.certificate, in->matrix ? *in->matrix : RatMat());
      res->has_certificate = true;
    }
    res->json = rep.dump();
    return finish(res.release(), out);
  });
}

copkit_status copkit_bound(const copkit_graph* g, const char* hierarchy, unsigned r, const copkit_options* opt,
                           copkit_result** out) {
  if (!g || !hierarchy || !out) return fail(COPKIT_E_ARGUMENT, "null argument");
  return guarded([&] {
    using namespace copkit;
    const ConeConfig cfg = config(opt);
    BoundReport b;
    switch (parse_hierarchy(hierarchy)) {
      case Hierarchy::Zeta: b = zeta_report(g->graph, r, g->source); break;
      case Hierarchy::Theta: b = theta_r(g->graph, r, cfg, g->source); break;
      case Hierarchy::Lovasz: b = lovasz_report(g->graph, cfg.sdp, g->source); break;
    }
    json rep = {{"graph", g->source},
                {"hierarchy", to_string(b.hierarchy)},
                {"order", b.order},
                {"alpha", b.alpha},
                {"value", number_or_null(b.value)},
                {"value_text", b.exact ? to_string(*b.exact) : number_text(b.value)},
                {"exact", b.hierarchy == Hierarchy::Zeta},
                {"floor", b.floor ? json(*b.floor) : json(nullptr)},
                {"gap", number_or_null(b.value - static_cast<double>(b.alpha))},
                {"notes", b.notes}};
    if (b.hierarchy == Hierarchy::Zeta && b.exact) {
      Rational gap = *b.exact - Rational(static_cast<long>(b.alpha));
      rep["gap_text"] = to_string(gap);
    }
    auto res = std::make_unique<copkit_result>();
    res->json = rep.dump();
    return finish(res.release(), out);
  });
}

copkit_status copkit_graph_report(const copkit_graph* g, copkit_result** out) {
  if (!g || !out) return fail(COPKIT_E_ARGUMENT, "null argument");
  return guarded([&] {
    using namespace copkit;
    const GraphReport gr = analyze_graph(g->graph);
    bool truncated = false;
    const ZeroSet z = graph_matrix_zeros(g->graph, &truncated);
    json sets = json::array(), crit = json::array(), finite = json::array(), families = json::array();
    for (const auto& s : gr.max_stable_sets) sets.push_back(vertices(s));
    for (const auto& [i, j] : gr.critical_edges) crit.push_back({i + 1, j + 1});
    for (const auto& p : z.finite_zeros) {
      json x = json::array();
      for (const auto& v : p.x) x.push_back(to_string(v));
      finite.push_back(x);
    }
    for (const auto& f : z.infinite_families)
      families.push_back({{"support", vertices(f.support)}, {"dimension", f.dimension}});
    json rep = {{"graph", g->source},
                {"order", g->graph.order()},
                {"edges", g->graph.size()},
                {"alpha", gr.alpha},
                {"max_stable_sets", sets},
                {"critical_edges", crit},
                {"acritical", gr.acritical},
                {"zeros",
                 {{"is_finite", z.is_finite},
                  {"finite_count", z.finite_zeros.size()},
                  {"finite", finite},
                  {"families", families},
                  {"truncated", truncated}}}};
    auto res = std::make_unique<copkit_result>();
    res->json = rep.dump();
    return finish(res.release(), out);
  });
}

copkit_status copkit_verify(const char* certificate_json, const copkit_input* in, copkit_result** out) {
  if (!certificate_json || !out) return fail(COPKIT_E_ARGUMENT, "null argument");
  return guarded([&] {
    using namespace copkit;
    const std::vector<std::string> errs = certificate_schema_errors(certificate_json);
    if (!errs.empty()) {
      std::string msg = "certificate schema violations:";
      for (const auto& e : errs) msg += "\n  " + e;
      return fail(COPKIT_E_ARGUMENT, msg);
    }
    std::string sha;
    const Certificate c = certificate_from_json(certificate_json, &sha);
    const VerifyMode mode = c.exact ? VerifyMode::Exact : VerifyMode::Float;
    json rep = {{"cone", to_string(c.cone)}, {"order", c.order}, {"mode", c.exact ? "exact" : "float"}};
    VerifyReport vr;
    bool pass = false;
    if (c.cone == ConeKind::Sos) {
      vr = verify_sos(c, mode);
      pass = vr.pass;
      if (in && in->polynomial) {
        const bool same = c.target == *in->polynomial;
        rep["target_match"] = same;
        pass = pass && same;
      }
    } else {
      if (!in || !in->matrix) return fail(COPKIT_E_ARGUMENT, "verifying a " + to_string(c.cone) + " certificate needs a matrix");
      const bool same = matrix_sha(*in->matrix) == sha;
      rep["sha_match"] = same;
      try {
        vr = verify_certificate(*in->matrix, c, mode);
      } catch (const std::invalid_argument& e) {
        if (same) throw;
        vr.pass = false;
        vr.identity_residual = std::numeric_limits<double>::infinity();
        vr.message = std::string("certificate does not fit the matrix: ") + e.what();
      }
      pass = vr.pass && same;
    }
    rep["pass"] = pass;
    rep["identity_residual"] = number_or_null(vr.identity_residual);
    json margins = json::array();
    for (double m : vr.psd_margins) margins.push_back(number_or_null(m));
    rep["psd_margins"] = margins;
    rep["message"] = vr.message;
    auto res = std::make_unique<copkit_result>();
    res->decision = pass ? COPKIT_YES : COPKIT_NO;
    res->json = rep.dump();
    return finish(res.release(), out);
  });
}

copkit_decision copkit_result_decision(const copkit_result* r) { return r ? r->decision : COPKIT_NONE; }

const char* copkit_result_json(const copkit_result* r) { return r ? r->json.c_str() : nullptr; }

const char* copkit_result_certificate(const copkit_result* r) {
  return r && r->has_certificate ? r->certificate.c_str() : nullptr;
}

void copkit_result_free(copkit_result* r) { delete r; }

}  // extern "C"
