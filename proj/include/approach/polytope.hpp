#pragma once

// H-representation polytopes and vertex enumeration at desk scale.
//
// Vertices are found by enumerating active sets: every vertex of
// {A_eq x = b_eq, A_in x <= b_in} solves a square system formed by the
// independent equality rows plus (dim - rank) inequality rows. Candidate
// solutions are kept when they satisfy every constraint within the
// feasibility tolerance and deduplicated. This is exponential in the number
// of inequality rows, which is fine for the action-simplex-sized problems
// the library works with; a guard trips long before it could hurt.

#include <algorithm>
#include <optional>
#include <vector>

#include "approach/common.hpp"
#include "approach/linalg.hpp"
#include "approach/lp.hpp"

namespace approach {

struct HPolytope {
  std::size_t dim = 0;
  DenseMatrix a_ineq;  // rows r: a_r . x <= b_ineq[r]
  Vec b_ineq;
  DenseMatrix a_eq;  // rows r: a_r . x == b_eq[r]
  Vec b_eq;
  // Set by constructors that embed a probability simplex (or another box);
  // lets enumeration skip the recession-cone check.
  bool known_bounded = false;

  static HPolytope empty_like(std::size_t dim) {
    HPolytope p;
    p.dim = dim;
    p.a_ineq = DenseMatrix(0, dim);
    p.a_eq = DenseMatrix(0, dim);
    return p;
  }

  void add_inequality(const Vec& a, double b) {
    require(a.size() == dim, "add_inequality: dimension mismatch");
    if (a_ineq.cols == 0) a_ineq = DenseMatrix(0, dim);
    a_ineq.append_row(a);
    b_ineq.push_back(b);
  }

  void add_equality(const Vec& a, double b) {
    require(a.size() == dim, "add_equality: dimension mismatch");
    if (a_eq.cols == 0) a_eq = DenseMatrix(0, dim);
    a_eq.append_row(a);
    b_eq.push_back(b);
  }

  bool contains(const Vec& x, double feas_tol = tol::feasibility) const {
    require(x.size() == dim, "contains: dimension mismatch");
    for (std::size_t r = 0; r < a_ineq.rows; ++r) {
      double lhs = 0.0;
      for (std::size_t c = 0; c < dim; ++c) lhs += a_ineq.at(r, c) * x[c];
      if (lhs > b_ineq[r] + feas_tol) return false;
    }
    for (std::size_t r = 0; r < a_eq.rows; ++r) {
      double lhs = 0.0;
      for (std::size_t c = 0; c < dim; ++c) lhs += a_eq.at(r, c) * x[c];
      if (std::abs(lhs - b_eq[r]) > feas_tol) return false;
    }
    return true;
  }
};

namespace detail {

// Indices of a maximal independent subset of the rows of M, found by
// Gaussian elimination with partial pivoting on a working copy.
inline std::vector<std::size_t> independent_rows(const DenseMatrix& M,
                                                 double pivot_tol = 1e-10) {
  std::vector<std::size_t> kept;
  if (M.rows == 0) return kept;
  DenseMatrix W = M;
  std::vector<std::size_t> order(M.rows);
  for (std::size_t i = 0; i < M.rows; ++i) order[i] = i;
  std::size_t lead_row = 0;
  for (std::size_t col = 0; col < M.cols && lead_row < W.rows; ++col) {
    std::size_t best = lead_row;
    for (std::size_t r = lead_row + 1; r < W.rows; ++r)
      if (std::abs(W.at(r, col)) > std::abs(W.at(best, col))) best = r;
    if (std::abs(W.at(best, col)) <= pivot_tol) continue;
    for (std::size_t c = 0; c < W.cols; ++c)
      std::swap(W.data[lead_row * W.cols + c], W.data[best * W.cols + c]);
    std::swap(order[lead_row], order[best]);
    const double inv = 1.0 / W.at(lead_row, col);
    for (std::size_t r = lead_row + 1; r < W.rows; ++r) {
      const double f = W.at(r, col) * inv;
      if (f == 0.0) continue;
      for (std::size_t c = col; c < W.cols; ++c)
        W.at(r, c) -= f * W.at(lead_row, c);
    }
    kept.push_back(order[lead_row]);
    ++lead_row;
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

// Feasibility of the polytope via one phase-1 LP (free variables split).
inline bool polytope_feasible(const HPolytope& P) {
  const std::size_t n = P.dim;
  const std::size_t rows = P.a_ineq.rows + 2 * P.a_eq.rows;
  DenseMatrix A(rows, 2 * n);
  Vec b(rows, 0.0);
  std::size_t r = 0;
  auto put_row = [&](const Vec& a, double sign, double rhs) {
    for (std::size_t c = 0; c < n; ++c) {
      A.at(r, c) = sign * a[c];
      A.at(r, n + c) = -sign * a[c];
    }
    b[r] = sign * rhs;
    ++r;
  };
  for (std::size_t i = 0; i < P.a_ineq.rows; ++i)
    put_row(P.a_ineq.row(i), 1.0, P.b_ineq[i]);
  for (std::size_t i = 0; i < P.a_eq.rows; ++i) {
    put_row(P.a_eq.row(i), 1.0, P.b_eq[i]);
    put_row(P.a_eq.row(i), -1.0, -P.b_eq[i]);
  }
  Vec c(2 * n, 0.0);
  return solve_lp(A, b, c).status == LpStatus::kOptimal;
}

// True when the recession cone {A_eq u = 0, A_in u <= 0} contains a nonzero
// direction. Checked by maximizing +-u_i over the cone clipped to the unit
// box; any strictly positive optimum certifies unboundedness.
inline bool recession_cone_nontrivial(const HPolytope& P) {
  const std::size_t n = P.dim;
  const std::size_t rows = P.a_ineq.rows + 2 * P.a_eq.rows + 2 * n;
  DenseMatrix A(rows, 2 * n);
  Vec b(rows, 0.0);
  std::size_t r = 0;
  auto put_row = [&](const Vec& a, double sign, double rhs) {
    for (std::size_t c = 0; c < n; ++c) {
      A.at(r, c) = sign * a[c];
      A.at(r, n + c) = -sign * a[c];
    }
    b[r] = rhs;
    ++r;
  };
  for (std::size_t i = 0; i < P.a_ineq.rows; ++i)
    put_row(P.a_ineq.row(i), 1.0, 0.0);
  for (std::size_t i = 0; i < P.a_eq.rows; ++i) {
    put_row(P.a_eq.row(i), 1.0, 0.0);
    put_row(P.a_eq.row(i), -1.0, 0.0);
  }
  for (std::size_t i = 0; i < n; ++i) {  // -1 <= u_i <= 1
    Vec e(n, 0.0);
    e[i] = 1.0;
    put_row(e, 1.0, 1.0);
    put_row(e, -1.0, 1.0);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (double sign : {1.0, -1.0}) {
      Vec c(2 * n, 0.0);
      c[i] = sign;
      c[n + i] = -sign;
      LpResult res = solve_lp(A, b, c);
      if (res.status == LpStatus::kOptimal && res.value > 1e-7) return true;
    }
  }
  return false;
}

inline void sort_points_lex(std::vector<Vec>& pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i] < b[i]) return true;
      if (a[i] > b[i]) return false;
    }
    return false;
  });
}

}  // namespace detail

// All vertices of a bounded polytope, deduplicated at tol::vertex_dedup and
// sorted lexicographically (which fixes every downstream tie-break).
// Returns an empty list iff the polytope is empty; throws on unbounded
// input unless the polytope is flagged known_bounded.
inline std::vector<Vec> enumerate_vertices(const HPolytope& P) {
  require(P.dim > 0, "enumerate_vertices: zero-dimensional polytope");
  require(P.a_ineq.rows == P.b_ineq.size() && P.a_eq.rows == P.b_eq.size(),
          "enumerate_vertices: malformed polytope");

  const std::vector<std::size_t> eq_rows = detail::independent_rows(P.a_eq);
  const std::size_t rank_eq = eq_rows.size();
  if (rank_eq > P.dim) return {};
  const std::size_t k = P.dim - rank_eq;

  // Subset-count guard: C(m, k) must stay desk-sized.
  {
    double combos = 1.0;
    for (std::size_t i = 0; i < k; ++i)
      combos *= static_cast<double>(P.a_ineq.rows - i) / static_cast<double>(i + 1);
    require(combos <= 2e6, "enumerate_vertices: too many active-set subsets");
  }

  std::vector<Vec> found;
  DenseMatrix sys(0, P.dim);
  Vec rhs;
  auto try_candidate = [&]() {
    std::optional<Vec> x = solve_exact(sys, rhs);
    if (!x) return;
    if (!P.contains(*x)) return;
    for (const Vec& v : found)
      if (norm_inf(sub(v, *x)) <= tol::vertex_dedup) return;
    found.push_back(std::move(*x));
  };

  std::vector<std::size_t> pick(k);
  auto rec = [&](auto&& self, std::size_t start, std::size_t depth) -> void {
    if (depth == k) {
      sys = DenseMatrix(0, P.dim);
      rhs.clear();
      for (std::size_t r : eq_rows) {
        sys.append_row(P.a_eq.row(r));
        rhs.push_back(P.b_eq[r]);
      }
      for (std::size_t r : pick) {
        sys.append_row(P.a_ineq.row(r));
        rhs.push_back(P.b_ineq[r]);
      }
      try_candidate();
      return;
    }
    for (std::size_t r = start; r + (k - depth) <= P.a_ineq.rows; ++r) {
      pick[depth] = r;
      self(self, r + 1, depth + 1);
    }
  };
  if (k == 0) {
    sys = DenseMatrix(0, P.dim);
    rhs.clear();
    for (std::size_t r : eq_rows) {
      sys.append_row(P.a_eq.row(r));
      rhs.push_back(P.b_eq[r]);
    }
    try_candidate();
  } else {
    rec(rec, 0, 0);
  }

  if (!P.known_bounded) {
    if (detail::recession_cone_nontrivial(P)) {
      if (!found.empty() || detail::polytope_feasible(P))
        throw invalid_input("enumerate_vertices: polytope is unbounded");
      return {};
    }
  }
  detail::sort_points_lex(found);
  return found;
}

}  // namespace approach
