#pragma once

// Brute-force approachability oracles, deliberately independent of the
// library's checker path: no flag grids, no subgradient descent, no LPs.
// A full-monitoring convex target is approachable iff for every opponent
// mixture y the hull of row payoffs {rho(x, y)} meets the target, so the
// oracle enumerates y on a fixed grid and minimizes the distance over x
// directly:
//   - scalar payoffs: the hull is the interval [min_i rho(i,y),
//     max_i rho(i,y)] and the distance comes out in closed form;
//   - vector payoffs (two rows only): a straight x-grid line search.
// The oracle's verdict is exact up to the grid mesh; corpus instances are
// chosen so worst mixtures sit on (or within tolerance of) grid points.

#include <cstddef>
#include <functional>
#include <vector>

#include "approach/common.hpp"
#include "approach/convex.hpp"
#include "approach/game.hpp"

namespace testsupport {

using approach::ConvexTarget;
using approach::GameSpec;
using approach::Vec;

struct OracleVerdict {
  bool approachable = true;
  double deficit = 0.0;  // max over y of min over x of d_C(rho(x,y))
  Vec worst_y;
};

namespace detail {

// Visits every probability vector with the given number of divisions.
inline void for_each_simplex_point(std::size_t dim, std::size_t divisions,
                                   const std::function<void(const Vec&)>& fn) {
  Vec point(dim, 0.0);
  std::function<void(std::size_t, std::size_t)> rec =
      [&](std::size_t coord, std::size_t left) {
        if (coord + 1 == dim) {
          point[coord] =
              static_cast<double>(left) / static_cast<double>(divisions);
          fn(point);
          return;
        }
        for (std::size_t take = 0; take <= left; ++take) {
          point[coord] =
              static_cast<double>(take) / static_cast<double>(divisions);
          rec(coord + 1, left - take);
        }
      };
  rec(0, divisions);
}

// d = 1: hull of row payoffs against y is an interval; its distance to the
// target is exact.
inline double scalar_min_distance(const GameSpec& g, const ConvexTarget& t,
                                  const Vec& y) {
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i < g.num_rows(); ++i) {
    double v = 0.0;
    for (std::size_t j = 0; j < g.num_cols(); ++j)
      v += y[j] * g.payoff(i, j)[0];
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  // Closest point of [lo, hi] to the target, scanned at the endpoints and
  // the target's own projection interval.
  double best = std::min(t.distance(Vec{lo}), t.distance(Vec{hi}));
  // Convexity in the scalar: the minimum over [lo, hi] is attained at an
  // endpoint or at a point inside the target; test containment by probing
  // the projection of the midpoint.
  const Vec mid{0.5 * (lo + hi)};
  const Vec proj = t.project(mid);
  if (proj[0] >= lo - 1e-12 && proj[0] <= hi + 1e-12) best = 0.0;
  return best;
}

// d >= 2, two rows: line search over x on its own grid.
inline double tworow_min_distance(const GameSpec& g, const ConvexTarget& t,
                                  const Vec& y, std::size_t x_divisions) {
  const std::size_t d = g.payoff_dim();
  Vec p0(d, 0.0), p1(d, 0.0), z(d, 0.0);
  for (std::size_t j = 0; j < g.num_cols(); ++j) {
    if (y[j] == 0.0) continue;
    const double* a = g.payoff(0, j);
    const double* b = g.payoff(1, j);
    for (std::size_t c = 0; c < d; ++c) {
      p0[c] += y[j] * a[c];
      p1[c] += y[j] * b[c];
    }
  }
  double best = 1e300;
  for (std::size_t s = 0; s <= x_divisions; ++s) {
    const double u =
        static_cast<double>(s) / static_cast<double>(x_divisions);
    for (std::size_t c = 0; c < d; ++c) z[c] = (1.0 - u) * p0[c] + u * p1[c];
    best = std::min(best, t.distance(z));
    if (best == 0.0) break;
  }
  return best;
}

}  // namespace detail

// Full-monitoring oracle at the given meshes (defaults match the acceptance
// tolerance of 1e-3). Vector-payoff games must have exactly two rows.
inline OracleVerdict full_monitoring_oracle(const GameSpec& g,
                                            const ConvexTarget& t,
                                            std::size_t y_divisions = 1000,
                                            std::size_t x_divisions = 1000,
                                            double tolerance = 1e-9) {
  approach::require(
      g.payoff_dim() == 1 || g.num_rows() == 2,
      "oracle: vector payoffs supported for two-row games only");
  OracleVerdict out;
  out.worst_y.assign(g.num_cols(), 0.0);
  detail::for_each_simplex_point(g.num_cols(), y_divisions, [&](const Vec& y) {
    const double d = g.payoff_dim() == 1
                         ? detail::scalar_min_distance(g, t, y)
                         : detail::tworow_min_distance(g, t, y, x_divisions);
    if (d > out.deficit) {
      out.deficit = d;
      out.worst_y = y;
    }
  });
  out.approachable = out.deficit <= tolerance;
  return out;
}

// Independent minimizer oracle for min-max distance problems: grid over
// Delta(2) or Delta(3) of x, exact max over the finite vertex list.
inline double min_max_grid_oracle(
    const GameSpec& g, const std::vector<Vec>& verts, const ConvexTarget& t,
    std::size_t divisions = 2000) {
  approach::require(g.num_rows() <= 3, "min_max_grid_oracle: <= 3 rows");
  double best = 1e300;
  detail::for_each_simplex_point(g.num_rows(), divisions, [&](const Vec& x) {
    double worst = 0.0;
    for (const Vec& v : verts)
      worst = std::max(worst, t.distance(approach::expected_payoff(g, x, v)));
    best = std::min(best, worst);
  });
  return best;
}

// 1-D upper concave envelope by direct chord maximization: for scalar
// priors q in [0,1] with values u(q), returns max over pairs (i, j) of the
// chord value at q0. Quadratic in the grid size, independent of any LP.
inline double concave_envelope_1d(const std::vector<double>& q,
                                  const std::vector<double>& u, double q0) {
  double best = -1e300;
  for (std::size_t i = 0; i < q.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) {
      const double lo = q[i], hi = q[j];
      if (q0 < lo - 1e-12 || q0 > hi + 1e-12 || hi - lo < -1e-12) continue;
      double val;
      if (hi - lo <= 1e-12) {
        if (std::abs(q0 - lo) > 1e-9) continue;
        val = std::max(u[i], u[j]);
      } else {
        const double w = (q0 - lo) / (hi - lo);
        val = (1.0 - w) * u[i] + w * u[j];
      }
      best = std::max(best, val);
    }
  return best;
}

}  // namespace testsupport
