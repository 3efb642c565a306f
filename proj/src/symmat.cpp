#include "copkit/symmat.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace copkit {

FloatMat to_float(const RatMat& m) {
  FloatMat out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) out.set(i, j, m(i, j).get_d());
  return out;
}

RatMat to_rational(const FloatMat& m) {
  RatMat out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) out.set(i, j, from_double(m(i, j)));
  return out;
}

namespace {

// Extends a vector supported on the active (not yet eliminated) coordinates
// to one whose quadratic form equals the Schur-complement form: every
// eliminated coordinate is chosen so the corresponding L^T row vanishes.
std::vector<Rational> back_substitute(std::size_t n, const std::vector<std::size_t>& pivots,
                                      const std::vector<std::vector<Rational>>& lcol,
                                      std::vector<Rational> x) {
  for (std::size_t t = pivots.size(); t-- > 0;) {
    const std::size_t p = pivots[t];
    Rational acc = 0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != p && lcol[t][j] != 0) acc += lcol[t][j] * x[j];
    x[p] = -acc;
  }
  return x;
}

}  // namespace

PsdCheck psd_check_exact(const RatMat& m) {
  const std::size_t n = m.size();
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = m(i, j);

  PsdCheck out;
  std::vector<bool> active(n, true);
  std::vector<std::vector<Rational>> lcol;  // lcol[t][j] = l_{j, pivot t}

  auto fail_with = [&](std::vector<Rational> x) {
    out.psd = false;
    out.witness = back_substitute(n, out.pivots, lcol, std::move(x));
    return out;
  };

  for (;;) {
    // Negative diagonal in the Schur complement: immediate witness.
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k]) continue;
      if (a[k][k] < 0) {
        std::vector<Rational> x(n, Rational(0));
        x[k] = 1;
        return fail_with(std::move(x));
      }
      if (a[k][k] > 0 && (!best || a[k][k] > a[*best][*best])) best = k;
    }
    if (!best) {
      // All active diagonals vanish: PSD iff the remaining block is zero.
      for (std::size_t k = 0; k < n; ++k) {
        if (!active[k]) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (!active[j] || j == k || a[k][j] == 0) continue;
          // S_kk = 0, S_kj != 0: take x_j = 1, x_k = t with S_jj + 2 t S_kj = -1.
          std::vector<Rational> x(n, Rational(0));
          x[j] = 1;
          x[k] = -(a[j][j] + 1) / (2 * a[k][j]);
          return fail_with(std::move(x));
        }
      }
      break;
    }
    const std::size_t p = *best;
    const Rational piv = a[p][p];
    std::vector<Rational> l(n, Rational(0));
    for (std::size_t j = 0; j < n; ++j)
      if (active[j] && j != p) l[j] = a[j][p] / piv;
    active[p] = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!active[i] || l[i] == 0) continue;
      for (std::size_t j = 0; j < n; ++j)
        if (active[j]) a[i][j] -= l[i] * a[p][j];
    }
    out.pivots.push_back(p);
    out.diag.push_back(piv);
    lcol.push_back(std::move(l));
  }
  out.psd = true;
  out.rank = out.pivots.size();
  return out;
}

std::vector<double> jacobi_eigenvalues(const FloatMat& m, double tol, int max_sweeps) {
  if (!(tol > 0)) throw std::invalid_argument("jacobi tolerance must be positive");
  const std::size_t n = m.size();
  std::vector<double> a(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i * n + j] = m(i, j);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };
  auto off_norm = [&] {
    double s = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += at(i, j) * at(i, j);
    return std::sqrt(s);
  };

  int sweep = 0;
  while (off_norm() > tol) {
    if (++sweep > max_sweeps) throw NumericalFailure("jacobi eigenvalue iteration did not converge");
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = at(k, p), akq = at(k, q);
          at(k, p) = c * akp - s * akq;
          at(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = at(p, k), aqk = at(q, k);
          at(p, k) = c * apk - s * aqk;
          at(q, k) = s * apk + c * aqk;
        }
        at(p, q) = at(q, p) = 0.0;
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = at(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

double min_eig_estimate(const FloatMat& m, double tol) {
  if (m.size() == 0) throw std::invalid_argument("empty matrix has no eigenvalues");
  return jacobi_eigenvalues(m, tol).front();
}

bool entrywise_nonneg(const RatMat& m) {
  for (const auto& v : m.packed())
    if (v < 0) return false;
  return true;
}

bool entrywise_nonneg(const FloatMat& m, double tol) {
  for (double v : m.packed())
    if (v < -tol) return false;
  return true;
}

RatMat direct_sum(const RatMat& a, const RatMat& b) {
  RatMat out(a.size() + b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) out.set(i, j, a(i, j));
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) out.set(a.size() + i, a.size() + j, b(i, j));
  return out;
}

RatMat parse_matrix(std::string_view text) {
  std::vector<std::string> tokens;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tok;
    while (ls >> tok) tokens.push_back(tok);
  }
  if (tokens.empty()) throw std::invalid_argument("matrix text is empty");
  Rational nq = parse_rational(tokens[0]);
  if (nq.get_den() != 1 || nq < 1 || nq > 1000)
    throw std::invalid_argument("matrix order must be an integer in [1, 1000]");
  const std::size_t n = nq.get_num().get_ui();
  if (tokens.size() != 1 + n * n)
    throw std::invalid_argument("expected " + std::to_string(n * n) + " entries for order " +
                                std::to_string(n) + ", found " + std::to_string(tokens.size() - 1));
  std::vector<std::vector<Rational>> rows(n, std::vector<Rational>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) rows[i][j] = parse_rational(tokens[1 + i * n + j]);
  return RatMat::from_rows(rows);
}

RatMat read_matrix_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open matrix file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_matrix(ss.str());
}

std::string format_matrix(const RatMat& m) {
  std::ostringstream os;
  os << m.size() << "\n";
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) os << (j ? " " : "") << to_string(m(i, j));
    os << "\n";
  }
  return os.str();
}

std::string format_matrix(const FloatMat& m, int precision) {
  std::ostringstream os;
  os << m.size() << "\n" << std::setprecision(precision);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) os << (j ? " " : "") << m(i, j);
    os << "\n";
  }
  return os.str();
}

}  // namespace copkit
