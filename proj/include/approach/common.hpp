#pragma once

// Shared scalar/vector helpers and the numeric tolerances used across the
// library. Every tolerance that appears in a contract is named here once so
// tests and implementations cannot drift apart.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace approach {

using Vec = std::vector<double>;

namespace tol {
// Probability vectors must sum to one within this.
inline constexpr double prob_sum = 1e-12;
// Vertex dedup / flag dedup thresholds.
inline constexpr double vertex_dedup = 1e-9;
inline constexpr double flag_dedup = 1e-10;
// Feasibility slack when verifying polytope membership.
inline constexpr double feasibility = 1e-8;
// Simplex pivot threshold.
inline constexpr double lp_pivot = 1e-9;
// distance()==0 vs contains() agreement.
inline constexpr double geometry = 1e-10;
// Default optimizer tolerance for min-max deficits.
inline constexpr double optimizer = 1e-6;
// Power-iteration stopping rule for invariant distributions.
inline constexpr double power_iteration = 1e-10;
// Uniform mixing rate (relative to the largest row sum) that makes a
// regret chain irreducible so its stationary law is unique and solvable.
inline constexpr double chain_mixing = 1e-9;
// Regularizer for degenerate active-set QP systems.
inline constexpr double tikhonov = 1e-12;
}  // namespace tol

// All precondition violations surface as this type; the CLI maps it to a
// usage error (exit code 1).
struct invalid_input : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw invalid_input(msg);
}

inline double dot(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), "dot: dimension mismatch");
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double norm2(const Vec& a) {
  return std::sqrt(std::inner_product(a.begin(), a.end(), a.begin(), 0.0));
}

inline double norm_inf(const Vec& a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

inline Vec sub(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), "sub: dimension mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline Vec add(const Vec& a, const Vec& b) {
  require(a.size() == b.size(), "add: dimension mismatch");
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline Vec scale(const Vec& a, double s) {
  Vec r(a);
  for (double& x : r) x *= s;
  return r;
}

// a += s*b
inline void axpy(Vec& a, double s, const Vec& b) {
  require(a.size() == b.size(), "axpy: dimension mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += s * b[i];
}

inline bool all_finite(const Vec& a) {
  return std::all_of(a.begin(), a.end(),
                     [](double x) { return std::isfinite(x); });
}

// Checks that `p` is a probability vector: nonnegative entries summing to one
// within tol::prob_sum (entries may dip to -prob_sum from rounding).
inline void require_probability(const Vec& p, const std::string& what) {
  require(!p.empty(), what + ": empty probability vector");
  double sum = 0.0;
  for (double x : p) {
    require(std::isfinite(x), what + ": non-finite entry");
    require(x >= -tol::prob_sum, what + ": negative entry");
    sum += x;
  }
  require(std::abs(sum - 1.0) <= tol::prob_sum, what + ": entries must sum to 1");
}

// All points of the probability simplex over `dim` coordinates whose entries
// are multiples of 1/divisions, in lexicographic order. Size is
// C(divisions + dim - 1, dim - 1).
inline std::vector<Vec> simplex_grid(std::size_t dim, std::size_t divisions) {
  require(dim >= 1, "simplex_grid: empty simplex");
  require(divisions >= 1, "simplex_grid: divisions must be positive");
  std::vector<Vec> out;
  Vec point(dim, 0.0);
  const double step = 1.0 / static_cast<double>(divisions);
  auto rec = [&](auto&& self, std::size_t coord, std::size_t left) -> void {
    if (coord + 1 == dim) {
      point[coord] = static_cast<double>(left) * step;
      out.push_back(point);
      return;
    }
    for (std::size_t c = 0; c <= left; ++c) {
      point[coord] = static_cast<double>(c) * step;
      self(self, coord + 1, left - c);
    }
  };
  rec(rec, 0, divisions);
  return out;
}

// Kahan-compensated accumulator for one coordinate.
struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    double y = x - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

// Compensated running sum of d-dimensional payoff vectors.
class KahanVecSum {
 public:
  KahanVecSum() = default;
  explicit KahanVecSum(std::size_t dim) : parts_(dim) {}
  void add(const Vec& x) {
    for (std::size_t i = 0; i < parts_.size(); ++i) parts_[i].add(x[i]);
  }
  Vec mean(std::size_t n) const {
    Vec m(parts_.size(), 0.0);
    if (n == 0) return m;
    for (std::size_t i = 0; i < parts_.size(); ++i)
      m[i] = parts_[i].sum / static_cast<double>(n);
    return m;
  }
  std::size_t dim() const { return parts_.size(); }

 private:
  std::vector<KahanSum> parts_;
};

}  // namespace approach
