#pragma once

// Approachability condition checkers. Both produce a Certificate: either a
// witness map (flag -> mixed action whose compatible payoffs stay inside the
// target) or a failing flag with a positive deficit.
//
//   * check_convex_full    - full-monitoring condition: for every opponent
//     mixture y some x puts the expected payoff in C. A facet phase computes
//     exact scalar-game duals (sound for rejection, and exact in dimension 1);
//     a primal grid phase over opponent mixtures confirms the verdict and
//     supplies the deficit. Ball targets have no facets and use the grid
//     phase alone.
//   * check_convex_partial - signal-structure condition: for every realizable
//     flag mu some x keeps rho(x, y) in C for ALL y compatible with mu.
//     Evaluated on a simplex grid mapped through the flag map, with mesh
//     refinement until the verdict is stable across two consecutive meshes.
//
// Failing scans additionally sharpen the reported deficit with a local
// search around the offending grid mixture, since worst mixtures (the
// uniform one, say) need not sit on any dyadic grid.
//   * halfspace_dichotomy  - a half-space is either approachable by the row
//     player or excludable by the column player with a positive margin.
//   * bset_response        - the projection-based response: from outside C,
//     the mixed action making <z - p, rho(x, y) - p> <= 0 for every y.

#include <optional>
#include <utility>
#include <vector>

#include "approach/common.hpp"
#include "approach/convex.hpp"
#include "approach/game.hpp"
#include "approach/solvers.hpp"

namespace approach {

enum class Verdict { kApproachable, kNotApproachable };

// How the flags stored in a certificate are to be read: kFull means each flag
// row is the opponent mixture itself (the checker ignored the game's signal
// structure); kPartial means flags live in the game's own signal space.
enum class MonitoringKind { kFull, kPartial };

struct Certificate {
  Verdict verdict = Verdict::kApproachable;
  MonitoringKind monitoring = MonitoringKind::kPartial;
  // Present iff approachable: for each grid flag, an x whose compatible
  // payoff set stays within `tolerance` of the target.
  std::vector<std::pair<Flag, MixedAction>> witness_map;
  std::optional<Flag> failing_flag;  // present iff not approachable
  double deficit = 0.0;              // > 0 iff not approachable
  double mesh = 0.0;                 // grid resolution of the final scan
  bool mesh_stable = true;           // verdict agreed across two meshes
  double tolerance = tol::optimizer;

  bool approachable() const { return verdict == Verdict::kApproachable; }
};

namespace detail {

// Embeds an opponent mixture as a full-monitoring flag (every row = y).
inline Flag full_monitoring_flag(std::size_t num_rows, const Vec& y) {
  Flag f(num_rows, y.size());
  for (std::size_t i = 0; i < num_rows; ++i)
    for (std::size_t s = 0; s < y.size(); ++s) f.at(i, s) = y[s];
  return f;
}

struct ScanResult {
  double deficit = 0.0;
  Flag worst;   // lexicographically first flag attaining the deficit
  Vec worst_y;  // a grid mixture generating that flag (seed for polishing)
  std::vector<std::pair<Flag, MixedAction>> witnesses;
};

inline bool lex_less(const Flag& a, const Flag& b) {
  return a.data < b.data;
}

// One grid pass of the full-monitoring (primal) condition: for each grid
// mixture y, min over x of d_C(rho(x,y)).
inline ScanResult scan_full(const GameSpec& g, const ConvexTarget& target,
                            std::size_t divisions,
                            const SimplexMinOptions& opt) {
  ScanResult out;
  for (const Vec& y : simplex_grid(g.num_cols(), divisions)) {
    MinMaxResult r = min_max_distance(g, {y}, target, opt);
    if (out.witnesses.empty() || r.delta > out.deficit + 1e-12) {
      out.deficit = std::max(out.deficit, r.delta);
      out.worst = full_monitoring_flag(g.num_rows(), y);
      out.worst_y = y;
    }
    out.witnesses.emplace_back(full_monitoring_flag(g.num_rows(), y),
                               std::move(r.x));
  }
  return out;
}

// One grid pass of the signal-structure condition: grid mixtures are mapped
// through the flag map, deduplicated, and each flag's inverse polytope is
// solved via its vertices.
inline ScanResult scan_partial(const GameSpec& g, const ConvexTarget& target,
                               std::size_t divisions,
                               const SimplexMinOptions& opt) {
  std::vector<std::pair<Flag, Vec>> flags;
  for (const Vec& y : simplex_grid(g.num_cols(), divisions))
    flags.emplace_back(flag_of(g, y), y);
  std::sort(flags.begin(), flags.end(), [](const auto& a, const auto& b) {
    return a.first.data != b.first.data ? lex_less(a.first, b.first)
                                        : a.second < b.second;
  });
  std::vector<std::pair<Flag, Vec>> unique;
  for (auto& f : flags) {
    if (!unique.empty()) {
      double gap = 0.0;
      for (std::size_t k = 0; k < f.first.data.size(); ++k)
        gap = std::max(gap, std::abs(f.first.data[k] -
                                     unique.back().first.data[k]));
      if (gap <= tol::flag_dedup) continue;
    }
    unique.push_back(std::move(f));
  }

  ScanResult out;
  for (const auto& [mu, y] : unique) {
    std::vector<Vec> verts = enumerate_vertices(inverse_flag_polytope(g, mu));
    if (verts.empty())
      throw std::runtime_error(
          "approachability scan: grid flag has empty inverse polytope");
    MinMaxResult r = min_max_distance(g, verts, target, opt);
    if (out.witnesses.empty() || r.delta > out.deficit + 1e-12) {
      out.deficit = std::max(out.deficit, r.delta);
      out.worst = mu;
      out.worst_y = y;
    }
    out.witnesses.emplace_back(mu, std::move(r.x));
  }
  return out;
}

// Sharpens a failing scan's deficit: worst mixtures need not sit on any
// dyadic grid (the uniform mixture over three columns never does), so a
// deterministic local search walks from the offending grid point. Moves per
// step: a contraction toward the centroid (the only move that lowers two
// maximal coordinates at once), a stretch toward each vertex, and pairwise
// mass exchanges; the step halves when no move improves. `eval` maps a
// mixture to the deficit of its flag plus the flag itself.
template <class EvalFn>
void polish_worst(ScanResult& scan, EvalFn&& eval) {
  const std::size_t J = scan.worst_y.size();
  if (J < 2) return;
  Vec y = scan.worst_y;
  double best = scan.deficit;
  Flag best_flag = scan.worst;
  int budget = 1500;
  double t = 0.5;
  while (t > 1e-9 && budget > 0) {
    bool improved = false;
    auto attempt = [&](Vec cand) {
      if (budget <= 0 || improved) return;
      --budget;
      clip_normalize(cand);
      auto [val, flag] = eval(cand);
      if (val > best + 1e-12) {
        best = val;
        y = std::move(cand);
        best_flag = std::move(flag);
        improved = true;
      }
    };
    {
      Vec cand = y;
      const double center = 1.0 / static_cast<double>(J);
      for (std::size_t j = 0; j < J; ++j) cand[j] += t * (center - y[j]);
      attempt(std::move(cand));
    }
    for (std::size_t a = 0; a < J && !improved; ++a) {
      Vec cand = y;
      for (std::size_t j = 0; j < J; ++j)
        cand[j] += t * ((j == a ? 1.0 : 0.0) - y[j]);
      attempt(std::move(cand));
    }
    for (std::size_t a = 0; a < J && !improved; ++a)
      for (std::size_t b = 0; b < J && !improved; ++b) {
        if (a == b || y[b] < t) continue;
        Vec cand = y;
        cand[a] += t;
        cand[b] -= t;
        attempt(std::move(cand));
      }
    if (!improved) t *= 0.5;
  }
  scan.deficit = best;
  scan.worst = std::move(best_flag);
  scan.worst_y = std::move(y);
}

// Runs scans at mesh, mesh/2, ... until the verdict is stable across two
// consecutive meshes (or the mesh floor is hit), then builds the certificate
// from the finest scan; failing scans get their deficit polished first.
template <class ScanFn, class PolishFn>
Certificate refine_to_certificate(double mesh, double tol_, double min_mesh,
                                  MonitoringKind kind, ScanFn&& scan,
                                  PolishFn&& polish) {
  require(mesh > 0.0, "checker: mesh must be positive");
  auto divisions = static_cast<std::size_t>(std::lround(1.0 / mesh));
  divisions = std::max<std::size_t>(divisions, 1);

  ScanResult last = scan(divisions);
  bool stable = false;
  while (true) {
    const bool last_ok = last.deficit <= tol_;
    if (1.0 / static_cast<double>(2 * divisions) < min_mesh) break;
    ScanResult next = scan(2 * divisions);
    divisions *= 2;
    const bool next_ok = next.deficit <= tol_;
    last = std::move(next);
    if (next_ok == last_ok) {
      stable = true;
      break;
    }
  }

  if (last.deficit > tol_) polish(last);

  Certificate cert;
  cert.monitoring = kind;
  cert.mesh = 1.0 / static_cast<double>(divisions);
  cert.mesh_stable = stable;
  cert.tolerance = tol_;
  if (last.deficit <= tol_) {
    cert.verdict = Verdict::kApproachable;
    cert.witness_map = std::move(last.witnesses);
  } else {
    cert.verdict = Verdict::kNotApproachable;
    cert.failing_flag = std::move(last.worst);
    cert.deficit = last.deficit;
  }
  return cert;
}

}  // namespace detail

struct CheckOptions {
  double mesh = 1.0 / 64.0;
  double tolerance = tol::optimizer;
  double min_mesh = 1.0 / 1024.0;
  SimplexMinOptions optimizer;
};

// Full-monitoring checker: does every opponent mixture admit a response whose
// expected payoff lies in the target?
inline Certificate check_convex_full(const GameSpec& g,
                                     const ConvexTarget& target,
                                     const CheckOptions& opt = {}) {
  require(target.dim() == g.payoff_dim(), "check_convex_full: dim mismatch");

  // Facet phase (polyhedral targets): the scalar game along each facet
  // normal must have value below the facet offset. A failure here is an
  // exact stationary-exclusion certificate.
  double facet_deficit = 0.0;
  Vec facet_y;
  if (target.kind() != ConvexTarget::Kind::kBall) {
    for (const auto& [a, b] : target.facets()) {
      DenseMatrix M(g.num_rows(), g.num_cols());
      for (std::size_t i = 0; i < g.num_rows(); ++i)
        for (std::size_t j = 0; j < g.num_cols(); ++j) {
          const double* p = g.payoff(i, j);
          double acc = 0.0;
          for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * p[k];
          M.at(i, j) = -acc;  // row player minimizes <a, rho>
        }
      GameValueResult gv = matrix_game_value(M);
      const double value = -gv.value;  // min_x max_y <a, rho(x,y)>
      const double gap = (value - b) / norm2(a);
      if (gap > facet_deficit + 1e-12) {
        facet_deficit = gap;
        facet_y = gv.y;
      }
    }
  }

  // Primal phase: grid over opponent mixtures. This both confirms facet
  // passes (facet passes alone do not imply approachability in dimension
  // >= 2) and produces the deficit attained by a worst stationary mixture.
  Certificate cert = detail::refine_to_certificate(
      opt.mesh, opt.tolerance, opt.min_mesh, MonitoringKind::kFull,
      [&](std::size_t divisions) {
        return detail::scan_full(g, target, divisions, opt.optimizer);
      },
      [&](detail::ScanResult& scan) {
        detail::polish_worst(scan, [&](const Vec& y) {
          MinMaxResult r = min_max_distance(g, {y}, target, opt.optimizer);
          return std::make_pair(
              r.delta, detail::full_monitoring_flag(g.num_rows(), y));
        });
      });
  if (facet_deficit > opt.tolerance && facet_deficit > cert.deficit) {
    // The dual certificate is exact along facet normals: it catches
    // excluding directions the grid missed and dominates grid deficits.
    cert.verdict = Verdict::kNotApproachable;
    cert.witness_map.clear();
    cert.failing_flag = detail::full_monitoring_flag(g.num_rows(), facet_y);
    cert.deficit = facet_deficit;
  }
  return cert;
}

// Signal-structure checker: for every realizable flag, some x keeps the
// whole compatible payoff set inside the target.
inline Certificate check_convex_partial(const GameSpec& g,
                                        const ConvexTarget& target,
                                        double mesh = 1.0 / 64.0,
                                        const CheckOptions& base = {}) {
  require(target.dim() == g.payoff_dim(),
          "check_convex_partial: dim mismatch");
  require(mesh > 0.0, "check_convex_partial: mesh must be positive");
  return detail::refine_to_certificate(
      mesh, base.tolerance, base.min_mesh, MonitoringKind::kPartial,
      [&](std::size_t divisions) {
        return detail::scan_partial(g, target, divisions, base.optimizer);
      },
      [&](detail::ScanResult& scan) {
        detail::polish_worst(scan, [&](const Vec& y) {
          const Flag mu = flag_of(g, y);
          std::vector<Vec> verts =
              enumerate_vertices(inverse_flag_polytope(g, mu));
          if (verts.empty()) return std::make_pair(-1.0, mu);
          return std::make_pair(
              min_max_distance(g, verts, target, base.optimizer).delta, mu);
        });
      });
}

// Half-spaces admit no middle ground: approachable by the row player, or
// excludable by the column player with margin delta.
struct DichotomyResult {
  bool approachable_by_p1 = false;
  double delta = 0.0;  // exclusion margin when not approachable
  Certificate certificate;
};

inline DichotomyResult halfspace_dichotomy(const GameSpec& g,
                                           const ConvexTarget& target,
                                           const CheckOptions& opt = {}) {
  require(target.kind() == ConvexTarget::Kind::kHalfSpace,
          "halfspace_dichotomy: target must be a half-space");
  DichotomyResult out;
  out.certificate = check_convex_partial(g, target, opt.mesh, opt);
  out.approachable_by_p1 = out.certificate.approachable();
  out.delta = out.approachable_by_p1 ? 0.0 : out.certificate.deficit;
  return out;
}

// Projection response: if z lies in C, any action works (uniform, for
// determinism); otherwise the optimal row mixture of the scalar game
// <z - p, rho(i,j) - p> for the minimizing row player. When the target
// passed check_convex_full the achieved value is <= 0 up to tolerance,
// which is exactly the separating-hyperplane condition.
inline MixedAction bset_response(const GameSpec& g, const ConvexTarget& target,
                                 const Vec& z) {
  require(z.size() == g.payoff_dim(), "bset_response: dim mismatch");
  if (target.distance(z) <= tol::geometry)
    return MixedAction(g.num_rows(), 1.0 / static_cast<double>(g.num_rows()));
  const Vec p = target.project(z);
  const Vec u = sub(z, p);
  DenseMatrix M(g.num_rows(), g.num_cols());
  for (std::size_t i = 0; i < g.num_rows(); ++i)
    for (std::size_t j = 0; j < g.num_cols(); ++j) {
      const double* r = g.payoff(i, j);
      double acc = 0.0;
      for (std::size_t k = 0; k < u.size(); ++k) acc += u[k] * (r[k] - p[k]);
      M.at(i, j) = -acc;  // row player minimizes the inner product
    }
  return matrix_game_value(M).x;
}

}  // namespace approach
