// copkit: command-line front end over the C API.
//
// Exit codes: 0 YES / success, 1 NO, 2 INCONCLUSIVE, >2 error.

#include <CLI11.hpp>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "copkit/copkit.h"

using nlohmann::json;

namespace {

constexpr const char* kSchema = "copkit/1";

struct Common {
  bool json_out = false;
  std::uint64_t seed = 0;
  double tol = 0;  // 0: default or COPKIT_TOL
};

int error_exit(copkit_status s) { return 2 + static_cast<int>(s); }

int report_error(const Common& c, const std::string& command, copkit_status s, const std::string& msg) {
  if (c.json_out)
    std::cout << json{{"schema", kSchema}, {"command", command}, {"error", msg}, {"code", error_exit(s)}}.dump()
              << "\n";
  else
    std::cerr << "copkit " << command << ": " << msg << "\n";
  return error_exit(s);
}

copkit_options options(const Common& c) {
  copkit_options o;
  copkit_options_default(&o);
  if (const char* env = std::getenv("COPKIT_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && *end == '\0' && v > 0) o.decision_tol = v;
  }
  if (c.tol > 0) o.decision_tol = c.tol;
  o.seed = c.seed;
  return o;
}

// RAII holders for the C handles.
template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};
using Input = Handle<copkit_input, copkit_input_free>;
using GraphH = Handle<copkit_graph, copkit_graph_free>;
using Result = Handle<copkit_result, copkit_result_free>;

std::string read_file(const std::string& path, bool& ok) {
  std::ifstream f(path);
  ok = static_cast<bool>(f);
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

void print_row(const std::string& key, const std::string& value) {
  std::cout << std::left << std::setw(14) << key << value << "\n";
}

// "3", "0..5" or "1,3,4".
std::vector<unsigned> parse_orders(const std::string& s) {
  std::vector<unsigned> out;
  auto num = [&](const std::string& t) {
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(t, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != t.size() || v > 1000) throw std::invalid_argument("bad order: " + t);
    return static_cast<unsigned>(v);
  };
  if (const auto dots = s.find(".."); dots != std::string::npos) {
    const unsigned a = num(s.substr(0, dots)), b = num(s.substr(dots + 2));
    if (a > b) throw std::invalid_argument("empty order range: " + s);
    for (unsigned r = a; r <= b; ++r) out.push_back(r);
    return out;
  }
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(num(tok));
  if (out.empty()) throw std::invalid_argument("no order given");
  return out;
}

int cmd_check(const Common& c, const std::string& source, const std::string& cone, unsigned r,
              const std::string& cert_path) {
  Input in;
  if (copkit_status s = copkit_input_load(source.c_str(), &in.p)) return report_error(c, "check", s, copkit_last_error());
  const copkit_options opt = options(c);
  Result res;
  if (copkit_status s = copkit_check(in.p, cone.c_str(), r, &opt, &res.p))
    return report_error(c, "check", s, copkit_last_error());
  json rep = json::parse(copkit_result_json(res.p));
  if (const char* cert = copkit_result_certificate(res.p)) {
    std::string path = cert_path;
    if (path.empty()) {
      const std::string sha = rep.value("matrix_sha", std::string("poly0000"));
      path = "copkit-" + cone + "-r" + std::to_string(r) + "-" + sha.substr(0, 8) + ".cert.json";
    }
    std::ofstream f(path);
    if (!f) return report_error(c, "check", COPKIT_E_IO, "cannot write certificate to " + path);
    f << cert << "\n";
    rep["certificate_path"] = path;
  }
  const copkit_decision d = copkit_result_decision(res.p);
  if (c.json_out) {
    json out = {{"schema", kSchema}, {"command", "check"}};
    out.update(rep);
    std::cout << out.dump() << "\n";
  } else {
    print_row("verdict", rep["decision"].get<std::string>());
    print_row("cone", cone + (cone == "spn" || cone == "k1" ? "" : " r=" + std::to_string(r)));
    print_row("margin", rep["margin_text"].get<std::string>());
    print_row("solver", rep["solver_status"].get<std::string>());
    if (!rep["note"].get<std::string>().empty()) print_row("note", rep["note"].get<std::string>());
    if (rep.contains("certificate_path"))
      print_row("certificate", rep["certificate_path"].get<std::string>() + " (" +
                                   rep["certificate_scalars"].get<std::string>() + ")");
  }
  return static_cast<int>(d);
}

int cmd_bound(const Common& c, const std::string& source, const std::string& hierarchy, const std::string& orders,
              unsigned jobs) {
  GraphH g;
  if (copkit_status s = copkit_graph_load(source.c_str(), &g.p)) return report_error(c, "bound", s, copkit_last_error());
  std::vector<unsigned> rs;
  try {
    rs = hierarchy == "lovasz" ? std::vector<unsigned>{0} : parse_orders(orders);
  } catch (const std::invalid_argument& e) {
    return report_error(c, "bound", COPKIT_E_ARGUMENT, e.what());
  }
  const copkit_options opt = options(c);
  std::vector<json> rows(rs.size());
  std::vector<copkit_status> status(rs.size(), COPKIT_OK);
  std::vector<std::string> errors(rs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < rs.size();) {
      copkit_result* res = nullptr;
      status[k] = copkit_bound(g.p, hierarchy.c_str(), rs[k], &opt, &res);
      if (status[k] == COPKIT_OK) rows[k] = json::parse(copkit_result_json(res));
      else errors[k] = copkit_last_error();
      copkit_result_free(res);
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < std::max(1u, jobs); ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (std::size_t k = 0; k < rs.size(); ++k)
    if (status[k] != COPKIT_OK) return report_error(c, "bound", status[k], errors[k]);
  if (c.json_out) {
    std::cout << json{{"schema", kSchema}, {"command", "bound"}, {"graph", source}, {"hierarchy", hierarchy},
                      {"rows", rows}}
                     .dump()
              << "\n";
    return 0;
  }
  std::cout << source << "  " << hierarchy << "  alpha = " << rows[0]["alpha"] << "\n";
  std::cout << std::left << std::setw(6) << "r" << std::setw(16) << "value" << std::setw(8) << "floor"
            << std::setw(8) << "alpha"
            << "gap\n";
  for (const auto& row : rows) {
    const std::string floor = row["floor"].is_null() ? "-" : std::to_string(row["floor"].get<long>());
    std::string gap = row.contains("gap_text") ? row["gap_text"].get<std::string>()
                      : row["gap"].is_null()   ? "inf"
                                               : [&] {
                                                   std::ostringstream os;
                                                   os << std::setprecision(6) << row["gap"].get<double>();
                                                   return os.str();
                                                 }();
    std::cout << std::setw(6) << (hierarchy == "lovasz" ? "-" : std::to_string(row["order"].get<unsigned>()))
              << std::setw(16) << row["value_text"].get<std::string>() << std::setw(8) << floor << std::setw(8)
              << row["alpha"].get<unsigned>() << gap << "\n";
  }
  return 0;
}

std::string join_vertices(const json& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + std::to_string(v[i].get<unsigned>());
  return out;
}

int cmd_graph(const Common& c, const std::string& source) {
  GraphH g;
  if (copkit_status s = copkit_graph_load(source.c_str(), &g.p)) return report_error(c, "graph", s, copkit_last_error());
  Result res;
  if (copkit_status s = copkit_graph_report(g.p, &res.p)) return report_error(c, "graph", s, copkit_last_error());
  json rep = json::parse(copkit_result_json(res.p));
  if (c.json_out) {
    json out = {{"schema", kSchema}, {"command", "graph"}};
    out.update(rep);
    std::cout << out.dump() << "\n";
    return 0;
  }
  print_row("graph", source);
  print_row("order", std::to_string(rep["order"].get<unsigned>()) + " vertices, " +
                         std::to_string(rep["edges"].get<unsigned>()) + " edges");
  print_row("alpha", std::to_string(rep["alpha"].get<unsigned>()));
  std::string sets;
  for (const auto& s : rep["max_stable_sets"]) sets += " {" + join_vertices(s, ",") + "}";
  print_row("stable sets", std::to_string(rep["max_stable_sets"].size()) + ":" + sets);
  std::string crit;
  for (const auto& e : rep["critical_edges"]) crit += " " + join_vertices(e, "-");
  print_row("critical", std::to_string(rep["critical_edges"].size()) + (crit.empty() ? "" : ":" + crit));
  print_row("acritical", rep["acritical"].get<bool>() ? "yes" : "no");
  const json& z = rep["zeros"];
  std::string zeros = std::to_string(z["finite_count"].get<unsigned>()) + " minimal zeros, ";
  zeros += z["is_finite"].get<bool>() ? "finite zero set"
                                      : std::to_string(z["families"].size()) + " infinite families";
  if (z["truncated"].get<bool>()) zeros += " (family search truncated)";
  print_row("M_G zeros", zeros);
  for (const auto& x : z["finite"]) {
    std::string pt;
    for (std::size_t i = 0; i < x.size(); ++i) pt += (i ? ", " : "") + x[i].get<std::string>();
    print_row("", "(" + pt + ")");
  }
  for (const auto& f : z["families"])
    print_row("", "family on {" + join_vertices(f["support"], ",") + "}, dimension " +
                      std::to_string(f["dimension"].get<unsigned>()));
  return 0;
}

int cmd_verify(const Common& c, const std::string& cert_path, const std::string& source) {
  bool ok = false;
  const std::string text = read_file(cert_path, ok);
  if (!ok) return report_error(c, "verify", COPKIT_E_IO, "cannot read certificate " + cert_path);
  Input in;
  if (!source.empty())
    if (copkit_status s = copkit_input_load(source.c_str(), &in.p))
      return report_error(c, "verify", s, copkit_last_error());
  Result res;
  if (copkit_status s = copkit_verify(text.c_str(), in.p, &res.p))
    return report_error(c, "verify", s, copkit_last_error());
  json rep = json::parse(copkit_result_json(res.p));
  const bool pass = rep["pass"].get<bool>();
  if (c.json_out) {
    json out = {{"schema", kSchema}, {"command", "verify"}};
    out.update(rep);
    std::cout << out.dump() << "\n";
  } else {
    print_row("verify", pass ? "PASS" : "FAIL");
    print_row("certificate", rep["cone"].get<std::string>() + " r=" + std::to_string(rep["order"].get<unsigned>()) +
                                 ", " + rep["mode"].get<std::string>() + " mode");
    if (rep.contains("sha_match")) print_row("matrix", rep["sha_match"].get<bool>() ? "hash matches" : "hash MISMATCH");
    std::ostringstream res_text;
    if (rep["identity_residual"].is_null())
      res_text << "n/a";
    else
      res_text << std::setprecision(3) << rep["identity_residual"].get<double>();
    print_row("residual", res_text.str());
    if (!rep["psd_margins"].empty()) {
      double worst = 0;
      bool first = true;
      for (const auto& m : rep["psd_margins"])
        if (m.is_number() && (first || m.get<double>() < worst)) {
          worst = m.get<double>();
          first = false;
        }
      std::ostringstream os;
      os << std::setprecision(3) << worst;
      print_row("min eigen", os.str() + " (floating-point estimate)");
    }
    if (!rep["message"].get<std::string>().empty()) print_row("message", rep["message"].get<std::string>());
  }
  return pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"copkit: copositivity certificates, graph bounds and verification"};
  app.require_subcommand(1);
  Common common;
  app.set_version_flag("--version", std::string(copkit_version()));
  auto add_common = [&](CLI::App* sub) {
    sub->add_flag("--json", common.json_out, "Emit one JSON object (schema copkit/1)");
    sub->add_option("--seed", common.seed, "Seed for the solver start jitter (0: deterministic)");
    sub->add_option("--tol", common.tol, "Decision tolerance (default 1e-7, or COPKIT_TOL)")->check(CLI::PositiveNumber);
  };

  std::string source, cone = "spn", cert_out;
  unsigned order = 0;
  auto* check = app.add_subcommand("check", "Test cone membership of a matrix or polynomial");
  check->add_option("source", source, "Matrix file or catalog:NAME")->required();
  check->add_option("--cone", cone, "c | spn | k1 | k | q | las | sos")
      ->check(CLI::IsMember({"c", "spn", "k1", "k", "q", "las", "sos"}));
  check->add_option("--r", order, "Hierarchy order");
  check->add_option("--cert", cert_out, "Where to write the certificate of a YES");
  add_common(check);

  std::string graph_source, hierarchy = "zeta", orders = "0";
  unsigned jobs = 1;
  auto* bound = app.add_subcommand("bound", "Stable-set bounds for a graph");
  bound->add_option("graph", graph_source, "Graph file or cycle:N | complete:N | path:N | petersen")->required();
  bound->add_option("--hierarchy", hierarchy, "zeta | theta | lovasz")
      ->check(CLI::IsMember({"zeta", "theta", "lovasz"}));
  bound->add_option("--r", orders, "Order, range a..b, or list a,b,c");
  bound->add_option("--jobs", jobs, "Parallel sweep cells")->check(CLI::Range(1u, 256u));
  add_common(bound);

  auto* graph = app.add_subcommand("graph", "Stability number, critical edges and graph-matrix zeros");
  graph->add_option("graph", graph_source, "Graph file or generator")->required();
  add_common(graph);

  std::string cert_in, verify_source;
  auto* verify = app.add_subcommand("verify", "Re-verify a certificate file");
  verify->add_option("certificate", cert_in, "Certificate JSON")->required();
  verify->add_option("source", verify_source, "Matrix file or catalog:NAME (not needed for sos)");
  add_common(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : std::max(code, 3);
  }

  if (check->parsed()) return cmd_check(common, source, cone, order, cert_out);
  if (bound->parsed()) return cmd_bound(common, graph_source, hierarchy, orders, jobs);
  if (graph->parsed()) return cmd_graph(common, graph_source);
  return cmd_verify(common, cert_in, verify_source);
}
