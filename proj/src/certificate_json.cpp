#include <openssl/evp.h>

#include <cstdio>
#include <json.hpp>
#include <stdexcept>

#include "copkit/cones.hpp"

namespace copkit {

using nlohmann::json;

std::string matrix_sha(const RatMat& m) {
  const std::string text = format_matrix(m);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 computation failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

namespace {

json scalar(const Rational& q, bool exact) {
  if (exact) return to_string(q);
  return q.get_d();
}

json matrix(const RatMat& m, bool exact) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.size(); ++j) row.push_back(scalar(m(i, j), exact));
    rows.push_back(std::move(row));
  }
  return rows;
}

json polynomial(const Polynomial& p, bool exact) {
  json terms = json::array();
  for (const auto& [e, c] : p.terms()) terms.push_back({{"exponent", e.entries()}, {"value", scalar(c, exact)}});
  return terms;
}

Rational parse_scalar(const json& v) {
  if (v.is_string()) return parse_rational(v.get<std::string>());
  if (v.is_number_integer()) return parse_rational(v.dump());
  if (v.is_number()) return from_double(v.get<double>());
  throw std::invalid_argument("certificate scalar must be a number or a \"p/q\" string");
}

RatMat parse_matrix_json(const json& rows) {
  if (!rows.is_array()) throw std::invalid_argument("certificate matrix must be an array of rows");
  std::vector<std::vector<Rational>> table;
  for (const auto& row : rows) {
    if (!row.is_array()) throw std::invalid_argument("certificate matrix row must be an array");
    std::vector<Rational> r;
    for (const auto& v : row) r.push_back(parse_scalar(v));
    table.push_back(std::move(r));
  }
  return RatMat::from_rows(table);
}

Exponent parse_exponent(const json& v, std::size_t nvars) {
  if (!v.is_array()) throw std::invalid_argument("exponent must be an array");
  std::vector<unsigned> e;
  for (const auto& x : v) {
    if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<long long>() >= 0))
      throw std::invalid_argument("exponent entries must be nonnegative integers");
    e.push_back(x.get<unsigned>());
  }
  if (nvars && e.size() != nvars) throw std::invalid_argument("exponent has the wrong length");
  return Exponent(std::move(e));
}

Polynomial parse_polynomial(const json& terms, std::size_t nvars) {
  if (!terms.is_array()) throw std::invalid_argument("polynomial must be an array of terms");
  Polynomial p(nvars);
  for (const auto& t : terms) p.add_term(parse_exponent(t.at("exponent"), nvars), parse_scalar(t.at("value")));
  return p;
}

}  // namespace

std::string certificate_to_json(const Certificate& c, const RatMat& m) {
  const bool ex = c.exact;
  json data = json::object();
  switch (c.cone) {
    case ConeKind::Polya: data["coefficients"] = polynomial(c.polya, true); break;
    case ConeKind::Spn:
      data["P"] = matrix(c.p, ex);
      data["N"] = matrix(c.n, ex);
      break;
    case ConeKind::K1: {
      json blocks = json::array();
      for (const auto& b : c.k1) blocks.push_back(matrix(b, ex));
      data["P"] = blocks;
      break;
    }
    default: {
      json blocks = json::array();
      for (const auto& g : c.grams) {
        json basis = json::array();
        for (const auto& e : g.basis) basis.push_back(e.entries());
        blocks.push_back({{"multiplier", polynomial(g.multiplier, true)}, {"basis", basis}, {"gram", matrix(g.gram, ex)}});
      }
      data["blocks"] = blocks;
      if (c.cone == ConeKind::Qr || c.cone == ConeKind::Lasserre) data["linear"] = polynomial(c.linear, ex);
      if (c.cone == ConeKind::Sos) data["target"] = polynomial(c.target, true);
    }
  }
  data["nvars"] = c.cone == ConeKind::Sos ? c.target.nvars() : m.size();
  json out = {{"cone", to_string(c.cone)},
              {"order", c.order},
              {"matrix_sha", c.cone == ConeKind::Sos ? std::string() : matrix_sha(m)},
              {"scalars", c.cone == ConeKind::Polya || ex ? "rational" : "float"},
              {"data", data}};
  return out.dump(2);
}

Certificate certificate_from_json(const std::string& text, std::string* sha) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("certificate is not valid JSON: ") + e.what());
  }
  try {
    Certificate c;
    c.cone = parse_cone_kind(j.at("cone").get<std::string>());
    c.order = j.at("order").get<unsigned>();
    const std::string scalars = j.at("scalars").get<std::string>();
    if (scalars != "rational" && scalars != "float") throw std::invalid_argument("scalars must be rational or float");
    c.exact = scalars == "rational";
    if (sha) *sha = j.at("matrix_sha").get<std::string>();
    const json& d = j.at("data");
    switch (c.cone) {
      case ConeKind::Polya: {
        c.polya = parse_polynomial(d.at("coefficients"), d.at("nvars").get<std::size_t>());
        break;
      }
      case ConeKind::Spn:
        c.p = parse_matrix_json(d.at("P"));
        c.n = parse_matrix_json(d.at("N"));
        break;
      case ConeKind::K1:
        for (const auto& b : d.at("P")) c.k1.push_back(parse_matrix_json(b));
        break;
      default: {
        const std::size_t nv = d.at("nvars").get<std::size_t>();
        for (const auto& b : d.at("blocks")) {
          GramBlock g;
          g.multiplier = parse_polynomial(b.at("multiplier"), nv);
          for (const auto& e : b.at("basis")) g.basis.push_back(parse_exponent(e, nv));
          g.gram = parse_matrix_json(b.at("gram"));
          c.grams.push_back(std::move(g));
        }
        c.linear = Polynomial(nv);
        if (d.contains("linear")) c.linear = parse_polynomial(d.at("linear"), nv);
        if (c.cone == ConeKind::Sos) c.target = parse_polynomial(d.at("target"), nv);
      }
    }
    return c;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed certificate: ") + e.what());
  }
}

std::vector<std::string> certificate_schema_errors(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    return {std::string("not valid JSON: ") + e.what()};
  }
  if (!j.is_object()) return {"top level: expected an object"};
  std::vector<std::string> errs;
  if (!j.contains("cone") || !j["cone"].is_string()) {
    errs.push_back("cone: missing or not a string");
  } else {
    try {
      parse_cone_kind(j["cone"].get<std::string>());
    } catch (const std::invalid_argument&) {
      errs.push_back("cone: unknown value \"" + j["cone"].get<std::string>() + "\"");
    }
  }
  if (!j.contains("order") || !j["order"].is_number_unsigned()) errs.push_back("order: missing or not a nonnegative integer");
  if (!j.contains("matrix_sha") || !j["matrix_sha"].is_string()) errs.push_back("matrix_sha: missing or not a string");
  if (!j.contains("scalars") || !j["scalars"].is_string() ||
      (j["scalars"] != "rational" && j["scalars"] != "float"))
    errs.push_back("scalars: must be \"rational\" or \"float\"");
  if (!j.contains("data") || !j["data"].is_object()) errs.push_back("data: missing or not an object");
  if (!errs.empty()) return errs;
  try {
    certificate_from_json(text);
  } catch (const std::invalid_argument& e) {
    errs.push_back(std::string("data: ") + e.what());
  }
  return errs;
}

}  // namespace copkit
