#pragma once

// Numeric workhorses:
//   * matrix_game_value - zero-sum value + optimal strategies via the
//     tableau simplex (closed form for 2x2), shifted so phase 1 is never
//     needed.
//   * simplex_minimize  - minimizes a convex function over a probability
//     simplex: multi-start projected subgradient with Polyak-style steps,
//     a pairwise-direction pattern polish, and (in dimensions <= 3 where
//     the optimizer tolerances are tightest) a hierarchical grid polish.
//   * min_max_distance  - min over x of max over column vertices of the
//     distance from rho(x, v) to a target; the core quantity behind both
//     approachability checkers.

#include <functional>
#include <vector>

#include "approach/common.hpp"
#include "approach/convex.hpp"
#include "approach/game.hpp"
#include "approach/lp.hpp"
#include "approach/qp.hpp"

namespace approach {

struct GameValueResult {
  double value = 0.0;   // max_x min_y x'Ay
  MixedAction x;        // optimal maximizing row mixture
  MixedAction y;        // optimal minimizing column mixture
};

namespace detail {

inline void clip_normalize(Vec& p) {
  double s = 0.0;
  for (double& v : p) {
    if (v < 0.0) v = 0.0;
    s += v;
  }
  if (s <= 0.0) {
    std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(p.size()));
  } else {
    for (double& v : p) v /= s;
  }
}

// max_x min_j (x'M)_j over the simplex, M shifted positive so the slack
// basis is feasible from the start (single-phase simplex).
inline std::pair<double, Vec> maximin_rows(const DenseMatrix& M) {
  const std::size_t I = M.rows, J = M.cols;
  double shift = 0.0;
  for (double v : M.data) shift = std::min(shift, v);
  shift = 1.0 - shift;  // entries + shift >= 1

  DenseMatrix A(J + 1, I + 1);
  Vec b(J + 1, 0.0), c(I + 1, 0.0);
  for (std::size_t j = 0; j < J; ++j) {
    for (std::size_t i = 0; i < I; ++i) A.at(j, i) = -(M.at(i, j) + shift);
    A.at(j, I) = 1.0;  // v <= (x'M')_j
  }
  for (std::size_t i = 0; i < I; ++i) A.at(J, i) = 1.0;  // sum x <= 1
  b[J] = 1.0;
  c[I] = 1.0;  // maximize v
  LpResult res = solve_lp(A, b, c);
  require(res.status == LpStatus::kOptimal, "matrix game LP failed");
  Vec x(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(I));
  clip_normalize(x);
  return {res.value - shift, std::move(x)};
}

}  // namespace detail

// Value and optimal strategies of the zero-sum matrix game x'Ay (row player
// maximizes). The value is computed from both sides; the duality gap stays
// within 1e-8 by construction of the two LPs.
inline GameValueResult matrix_game_value(const DenseMatrix& A) {
  require(A.rows >= 1 && A.cols >= 1, "matrix_game_value: empty matrix");
  require(all_finite(A.data), "matrix_game_value: non-finite entries");

  GameValueResult out;
  if (A.rows == 2 && A.cols == 2) {
    // Support enumeration: check the four pure saddles, else the unique
    // fully mixed equilibrium.
    const double a = A.at(0, 0), b = A.at(0, 1), c = A.at(1, 0), d = A.at(1, 1);
    const double rmin0 = std::min(a, b), rmin1 = std::min(c, d);
    const double cmax0 = std::max(a, c), cmax1 = std::max(b, d);
    const double maximin = std::max(rmin0, rmin1);
    const double minimax = std::min(cmax0, cmax1);
    if (maximin >= minimax - 1e-14) {  // pure saddle
      out.value = maximin;
      out.x = rmin0 >= rmin1 ? Vec{1.0, 0.0} : Vec{0.0, 1.0};
      out.y = cmax0 <= cmax1 ? Vec{1.0, 0.0} : Vec{0.0, 1.0};
      return out;
    }
    const double denom = a - b - c + d;
    double xt = (d - c) / denom;
    double yl = (d - b) / denom;
    xt = std::min(1.0, std::max(0.0, xt));
    yl = std::min(1.0, std::max(0.0, yl));
    out.value = (a * d - b * c) / denom;
    out.x = {xt, 1.0 - xt};
    out.y = {yl, 1.0 - yl};
    return out;
  }

  auto [v_row, x] = detail::maximin_rows(A);
  DenseMatrix neg_t(A.cols, A.rows);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j) neg_t.at(j, i) = -A.at(i, j);
  auto [v_col, y] = detail::maximin_rows(neg_t);
  require(std::abs(v_row + v_col) <= 1e-7,
          "matrix_game_value: duality gap exceeded tolerance");
  out.value = v_row;
  out.x = std::move(x);
  out.y = std::move(y);
  return out;
}

// ---------------------------------------------------------------------------
// Convex minimization over the probability simplex.
// ---------------------------------------------------------------------------

struct SimplexMinOptions {
  int subgrad_iters = 400;
  int pattern_rounds = 200;
  bool grid_polish = true;  // applied automatically only when dim <= 3
  int grid_levels = 12;
  double initial_grid_mesh = 1.0 / 16.0;
};

struct SimplexMinResult {
  Vec x;
  double value = 0.0;
};

// f: Vec -> double (convex); fg: (Vec, Vec& grad) -> double returning the
// value and writing one subgradient.
template <class F, class FG>
SimplexMinResult simplex_minimize(std::size_t n, F&& f, FG&& fg,
                                  const SimplexMinOptions& opt = {}) {
  require(n >= 1, "simplex_minimize: empty simplex");
  Vec best_x(n, 1.0 / static_cast<double>(n));
  double best_f = f(best_x);

  auto consider = [&](const Vec& x, double fx) {
    if (fx < best_f) {
      best_f = fx;
      best_x = x;
    }
  };

  // Multi-start projected subgradient with a shrinking Polyak target.
  std::vector<Vec> starts;
  for (std::size_t i = 0; i < n; ++i) {
    Vec e(n, 0.0);
    e[i] = 1.0;
    starts.push_back(std::move(e));
  }
  starts.push_back(Vec(n, 1.0 / static_cast<double>(n)));
  Vec grad(n);
  for (const Vec& s : starts) {
    Vec x = s;
    double local_best = f(x);
    consider(x, local_best);
    if (n == 1) break;
    for (int k = 0; k < opt.subgrad_iters; ++k) {
      double fx = fg(x, grad);
      consider(x, fx);
      local_best = std::min(local_best, fx);
      double gnorm_sq = dot(grad, grad);
      if (gnorm_sq <= 1e-18 || fx <= 1e-13) break;
      double target = std::max(0.0, local_best - local_best /
                                        (2.0 + 0.25 * static_cast<double>(k)));
      double step = (fx - target) / gnorm_sq;
      step = std::min(step, 1.0 / std::sqrt(gnorm_sq));  // simplex-scale cap
      Vec next = x;
      axpy(next, -step, grad);
      x = project_onto_simplex(next);
    }
  }

  // Pattern polish along pairwise exchange directions e_a - e_b.
  if (n >= 2) {
    Vec x = best_x;
    double t = 0.25;
    for (int round = 0; round < opt.pattern_rounds && t > 1e-10; ++round) {
      bool improved = false;
      for (std::size_t a = 0; a < n && !improved; ++a) {
        for (std::size_t b = 0; b < n && !improved; ++b) {
          if (a == b) continue;
          if (x[b] < t) continue;  // would leave the simplex
          Vec cand = x;
          cand[a] += t;
          cand[b] -= t;
          double fc = f(cand);
          if (fc < best_f - 1e-15) {
            x = std::move(cand);
            best_f = fc;
            best_x = x;
            improved = true;
          }
        }
      }
      if (!improved) t *= 0.5;
    }
  }

  // Hierarchical grid refinement; exact enough for the 1e-6 contracts in
  // the low dimensions where they apply.
  if (opt.grid_polish && n >= 2 && n <= 3) {
    Vec center = best_x;
    double mesh = opt.initial_grid_mesh;
    double radius = 1.0;  // first level scans the whole simplex
    for (int level = 0; level < opt.grid_levels; ++level) {
      const int steps = static_cast<int>(std::ceil(radius / mesh));
      if (n == 2) {
        for (int s = -steps; s <= steps; ++s) {
          double x0 = center[0] + s * mesh;
          if (x0 < 0.0 || x0 > 1.0) continue;
          Vec cand{x0, 1.0 - x0};
          consider(cand, f(cand));
        }
      } else {
        for (int s0 = -steps; s0 <= steps; ++s0) {
          double x0 = center[0] + s0 * mesh;
          if (x0 < 0.0 || x0 > 1.0) continue;
          for (int s1 = -steps; s1 <= steps; ++s1) {
            double x1 = center[1] + s1 * mesh;
            if (x1 < 0.0 || x0 + x1 > 1.0) continue;
            Vec cand{x0, x1, 1.0 - x0 - x1};
            consider(cand, f(cand));
          }
        }
      }
      center = best_x;
      radius = 2.0 * mesh;
      mesh *= 0.25;
    }
  }

  return {best_x, best_f};
}

// ---------------------------------------------------------------------------
// min_max_distance
// ---------------------------------------------------------------------------

struct MinMaxResult {
  MixedAction x;       // the minimizing mixture
  double delta = 0.0;  // min over x of max over vertices of d_C(rho(x, v))
};

// Minimizes x |-> max_v d_C(rho(x, v)) over Delta(I), where v ranges over
// the given column mixtures (typically the vertices of an inverse-flag
// polytope; a max of convex functions is attained at vertices, so this
// equals the max over the whole polytope).
inline MinMaxResult min_max_distance(const GameSpec& g,
                                     const std::vector<MixedAction>& verts,
                                     const ConvexTarget& target,
                                     const SimplexMinOptions& opt = {}) {
  require(!verts.empty(), "min_max_distance: no column vertices");
  require(target.dim() == g.payoff_dim(), "min_max_distance: dim mismatch");
  const std::size_t I = g.num_rows();
  const std::size_t d = g.payoff_dim();

  // Per-vertex payoff map: column i of M_v is rho(e_i, v).
  std::vector<DenseMatrix> maps;
  maps.reserve(verts.size());
  for (const MixedAction& v : verts) {
    require(v.size() == g.num_cols(), "min_max_distance: vertex length");
    DenseMatrix M(d, I);
    for (std::size_t i = 0; i < I; ++i)
      for (std::size_t j = 0; j < g.num_cols(); ++j) {
        if (v[j] == 0.0) continue;
        const double* p = g.payoff(i, j);
        for (std::size_t k = 0; k < d; ++k) M.at(k, i) += v[j] * p[k];
      }
    maps.push_back(std::move(M));
  }

  Vec z(d);
  auto payoff_at = [&](const DenseMatrix& M, const Vec& x, Vec& out) {
    for (std::size_t k = 0; k < d; ++k) {
      double acc = 0.0;
      for (std::size_t i = 0; i < I; ++i) acc += M.at(k, i) * x[i];
      out[k] = acc;
    }
  };
  auto value = [&](const Vec& x) {
    double worst = 0.0;
    for (const DenseMatrix& M : maps) {
      payoff_at(M, x, z);
      worst = std::max(worst, target.distance(z));
    }
    return worst;
  };
  auto value_grad = [&](const Vec& x, Vec& grad) {
    double worst = -1.0;
    std::size_t worst_idx = 0;
    Vec worst_z(d);
    for (std::size_t m = 0; m < maps.size(); ++m) {
      payoff_at(maps[m], x, z);
      double dist = target.distance(z);
      if (dist > worst) {
        worst = dist;
        worst_idx = m;
        worst_z = z;
      }
    }
    std::fill(grad.begin(), grad.end(), 0.0);
    if (worst > 1e-14) {
      Vec u = sub(worst_z, target.project(worst_z));
      for (double& c : u) c /= worst;
      const DenseMatrix& M = maps[worst_idx];
      for (std::size_t i = 0; i < I; ++i) {
        double acc = 0.0;
        for (std::size_t k = 0; k < d; ++k) acc += M.at(k, i) * u[k];
        grad[i] = acc;
      }
    }
    return worst;
  };

  SimplexMinResult r = simplex_minimize(I, value, value_grad, opt);
  return {std::move(r.x), r.value};
}

}  // namespace approach
