#pragma once

// Euclidean projection onto the convex hull of a finite point set, solved as
// an active-set QP over the weight simplex (the classic NNLS-style scheme).
// The KKT systems are tiny; degenerate active sets fall back to a Tikhonov
// regularized solve inside solve_kkt. Also provides the sort-based
// projection onto the probability simplex used by subgradient steps.

#include <algorithm>
#include <cstddef>
#include <vector>

#include "approach/common.hpp"
#include "approach/linalg.hpp"

namespace approach {

struct HullProjection {
  Vec point;     // the projection of z
  Vec weights;   // convex weights over the input points
  double distance = 0.0;
};

inline HullProjection project_onto_hull(const std::vector<Vec>& points,
                                        const Vec& z) {
  require(!points.empty(), "project_onto_hull: no points");
  const std::size_t m = points.size();
  const std::size_t d = z.size();
  for (const Vec& p : points)
    require(p.size() == d, "project_onto_hull: dimension mismatch");

  double scale = 1.0 + norm2(z);
  for (const Vec& p : points) scale = std::max(scale, 1.0 + norm2(p));
  const double opt_tol = 1e-10 * scale;

  // Start from the closest single point.
  std::size_t best = 0;
  double best_d = norm2(sub(points[0], z));
  for (std::size_t i = 1; i < m; ++i) {
    double di = norm2(sub(points[i], z));
    if (di < best_d - 1e-15) {
      best_d = di;
      best = i;
    }
  }
  std::vector<bool> active(m, false);  // true = in the support set F
  active[best] = true;
  Vec lambda(m, 0.0);
  lambda[best] = 1.0;

  auto compose = [&](const Vec& w) {
    Vec pt(d, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      if (w[i] != 0.0) axpy(pt, w[i], points[i]);
    return pt;
  };

  const int max_iter = 50 * static_cast<int>(m) + 50;
  double nu = 0.0;
  for (int iter = 0; iter < max_iter; ++iter) {
    // Equality-constrained subproblem on the support set.
    std::vector<std::size_t> F;
    for (std::size_t i = 0; i < m; ++i)
      if (active[i]) F.push_back(i);
    const std::size_t f = F.size();
    DenseMatrix K(f + 1, f + 1);
    Vec rhs(f + 1, 0.0);
    for (std::size_t a = 0; a < f; ++a) {
      for (std::size_t b = a; b < f; ++b) {
        double g = dot(points[F[a]], points[F[b]]);
        K.at(a, b) = g;
        K.at(b, a) = g;
      }
      K.at(a, f) = 1.0;
      K.at(f, a) = 1.0;
      rhs[a] = dot(points[F[a]], z);
    }
    rhs[f] = 1.0;
    Vec sol = solve_kkt(K, rhs);
    nu = sol[f];

    double min_w = 0.0;
    for (std::size_t a = 0; a < f; ++a) min_w = std::min(min_w, sol[a]);
    if (min_w >= -1e-12) {
      std::fill(lambda.begin(), lambda.end(), 0.0);
      for (std::size_t a = 0; a < f; ++a)
        lambda[F[a]] = std::max(0.0, sol[a]);
      // Optimality over the inactive points: the active gradient equals -nu,
      // so every inactive point needs <p_i, resid> + nu >= 0.
      Vec pt = compose(lambda);
      Vec resid = sub(pt, z);
      std::size_t worst = m;
      double worst_v = -opt_tol;
      for (std::size_t i = 0; i < m; ++i) {
        if (active[i]) continue;
        double gi = dot(points[i], resid) + nu;
        if (gi < worst_v) {
          worst_v = gi;
          worst = i;
        }
      }
      if (worst == m) {
        HullProjection out;
        out.point = std::move(pt);
        out.weights = std::move(lambda);
        out.distance = norm2(resid);
        return out;
      }
      active[worst] = true;
      continue;
    }

    // Partial step toward the subproblem solution, dropping the first
    // weight that hits zero.
    Vec target(m, 0.0);
    for (std::size_t a = 0; a < f; ++a) target[F[a]] = sol[a];
    double alpha = 1.0;
    std::size_t drop = m;
    for (std::size_t i = 0; i < m; ++i) {
      if (!active[i] || target[i] >= lambda[i]) continue;
      double step = lambda[i] / (lambda[i] - target[i]);
      if (step < alpha - 1e-15) {
        alpha = step;
        drop = i;
      }
    }
    for (std::size_t i = 0; i < m; ++i)
      lambda[i] = active[i] ? lambda[i] + alpha * (target[i] - lambda[i]) : 0.0;
    if (drop != m) {
      lambda[drop] = 0.0;
      active[drop] = false;
    }
  }

  // Iteration guard tripped: return the best feasible iterate.
  HullProjection out;
  out.weights = lambda;
  out.point = compose(lambda);
  out.distance = norm2(sub(out.point, z));
  return out;
}

// Euclidean projection onto the probability simplex (sort/threshold method).
inline Vec project_onto_simplex(const Vec& v) {
  const std::size_t n = v.size();
  require(n > 0, "project_onto_simplex: empty vector");
  Vec u(v);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double acc = 0.0;
  double theta = 0.0;
  std::size_t rho = 0;
  for (std::size_t j = 0; j < n; ++j) {
    acc += u[j];
    double t = (acc - 1.0) / static_cast<double>(j + 1);
    if (u[j] - t > 0.0) {
      rho = j + 1;
      theta = t;
    }
  }
  Vec x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::max(0.0, v[i] - theta);
  // Exact renormalization guards the 1e-12 simplex invariant downstream.
  double s = 0.0;
  for (double xi : x) s += xi;
  if (s > 0.0)
    for (double& xi : x) xi /= s;
  return x;
}

}  // namespace approach
