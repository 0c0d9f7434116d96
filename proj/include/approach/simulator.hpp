#pragma once

// Repeated-play engine with omniscient evaluation. The engine samples both
// players' actions and the signal, delivers observations according to the
// information structure (Player 1 sees (i, signal, realized payoff), Player 2
// sees (i, j, signal)), and records whatever the evaluator needs — including
// the opponent's mixed actions, which strategies themselves never receive.
//
// Everything is deterministic given the run seed: the environment, Player 1
// and Player 2 draw from three independent derived streams.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "approach/common.hpp"
#include "approach/convex.hpp"
#include "approach/game.hpp"
#include "approach/rng.hpp"
#include "approach/solvers.hpp"
#include "approach/strategies.hpp"

namespace approach {

struct RunOptions {
  std::size_t horizon = 0;
  std::uint64_t seed = 0;
  // Per-stage records (actions, signals, types, mixed actions, payoffs,
  // running averages). Needed by per_type_regret; heavy for bulk runs.
  bool record_stages = true;
  // Stage indices (1-based) at which the running average is snapshotted
  // regardless of record_stages. Must be sorted ascending.
  std::vector<std::uint64_t> checkpoints;
  std::string game_id;
  std::string target_id;
};

struct Trace {
  std::uint64_t seed = 0;
  std::size_t horizon = 0;
  std::string game_id, target_id;
  Vec final_avg;
  std::vector<std::pair<std::uint64_t, Vec>> checkpoint_avg;

  bool has_stage_records = false;
  std::vector<std::uint32_t> p1_actions, p2_actions, signals;
  std::vector<int> types;  // -1 where the strategy exposes no type
  std::vector<Vec> mixed_x, mixed_y, payoffs, running_avg;
};

inline Trace run(const GameSpec& game, Player1Strategy& sigma,
                 Player2Strategy& tau, const RunOptions& opts) {
  require(opts.horizon >= 1, "run: horizon must be positive");
  require(std::is_sorted(opts.checkpoints.begin(), opts.checkpoints.end()),
          "run: checkpoints must be sorted");

  Trace tr;
  tr.seed = opts.seed;
  tr.horizon = opts.horizon;
  tr.game_id = opts.game_id;
  tr.target_id = opts.target_id;
  tr.has_stage_records = opts.record_stages;
  if (opts.record_stages) {
    tr.p1_actions.reserve(opts.horizon);
    tr.p2_actions.reserve(opts.horizon);
    tr.signals.reserve(opts.horizon);
    tr.types.reserve(opts.horizon);
    tr.mixed_x.reserve(opts.horizon);
    tr.mixed_y.reserve(opts.horizon);
    tr.payoffs.reserve(opts.horizon);
    tr.running_avg.reserve(opts.horizon);
  }

  Rng env(derive_seed(opts.seed, 0));
  sigma.reset(derive_seed(opts.seed, 1));
  tau.reset(derive_seed(opts.seed, 2));

  const std::size_t d = game.payoff_dim();
  KahanVecSum sum(d);
  Vec payoff_buf(d);
  std::size_t next_checkpoint = 0;
  std::size_t stage = 0;
  try {
    for (stage = 1; stage <= opts.horizon; ++stage) {
      const MixedAction& x = sigma.next_mixed();
      const int type = sigma.current_type();
      const MixedAction& y = tau.next_mixed();
      const auto i = static_cast<std::size_t>(env.sample(x));
      const auto j = static_cast<std::size_t>(env.sample(y));
      const auto s = static_cast<std::size_t>(sample_signal(game, i, j, env));
      const double* p = game.payoff(i, j);
      payoff_buf.assign(p, p + d);
      sum.add(payoff_buf);

      if (opts.record_stages) {
        tr.p1_actions.push_back(static_cast<std::uint32_t>(i));
        tr.p2_actions.push_back(static_cast<std::uint32_t>(j));
        tr.signals.push_back(static_cast<std::uint32_t>(s));
        tr.types.push_back(type);
        tr.mixed_x.push_back(x);
        tr.mixed_y.push_back(y);
        tr.payoffs.push_back(payoff_buf);
        tr.running_avg.push_back(sum.mean(stage));
      }
      while (next_checkpoint < opts.checkpoints.size() &&
             opts.checkpoints[next_checkpoint] == stage) {
        tr.checkpoint_avg.emplace_back(stage, sum.mean(stage));
        ++next_checkpoint;
      }

      sigma.observe(i, s, payoff_buf);
      tau.observe(i, j, s);
    }
  } catch (const std::exception& e) {
    throw std::runtime_error("run: stage " + std::to_string(stage) + ": " +
                             e.what());
  }
  tr.final_avg = sum.mean(opts.horizon);
  return tr;
}

// Distance-to-target series: per stage when stage records exist, otherwise
// at the recorded checkpoints.
inline std::vector<std::pair<std::uint64_t, double>> metrics(
    const Trace& tr, const ConvexTarget& target) {
  std::vector<std::pair<std::uint64_t, double>> out;
  if (tr.has_stage_records) {
    out.reserve(tr.running_avg.size());
    for (std::size_t t = 0; t < tr.running_avg.size(); ++t)
      out.emplace_back(t + 1, target.distance(tr.running_avg[t]));
  } else {
    out.reserve(tr.checkpoint_avg.size());
    for (const auto& [n, avg] : tr.checkpoint_avg)
      out.emplace_back(n, target.distance(avg));
  }
  return out;
}

// Final-stage internal regret of each type, evaluated omnisciently: the
// opponent's average mixed action over the stages of type l gives the true
// average flag, and the regret compares the type's response against the
// best response to that flag.
struct TypeRegret {
  std::uint64_t count = 0;
  double weight = 0.0;  // |N_n(l)| / n
  double regret = 0.0;  // 0 when the type was never played
};

inline std::vector<TypeRegret> per_type_regret(
    const GameSpec& game, const ConvexTarget& target, const Trace& tr,
    const std::vector<CalType>& types, const SimplexMinOptions& opt = {}) {
  require(tr.has_stage_records,
          "per_type_regret: trace lacks omniscient stage records");
  const std::size_t L = types.size();
  std::vector<KahanVecSum> y_sum(L, KahanVecSum(game.num_cols()));
  std::vector<std::uint64_t> counts(L, 0);
  for (std::size_t t = 0; t < tr.types.size(); ++t) {
    const int l = tr.types[t];
    if (l < 0) continue;
    require(static_cast<std::size_t>(l) < L,
            "per_type_regret: type index out of range");
    y_sum[static_cast<std::size_t>(l)].add(tr.mixed_y[t]);
    ++counts[static_cast<std::size_t>(l)];
  }

  std::vector<TypeRegret> out(L);
  for (std::size_t l = 0; l < L; ++l) {
    out[l].count = counts[l];
    out[l].weight = static_cast<double>(counts[l]) /
                    static_cast<double>(tr.horizon);
    if (counts[l] == 0) continue;  // zero weight, regret reported as 0
    Vec y_bar = y_sum[l].mean(counts[l]);
    detail::clip_normalize(y_bar);
    const Flag mu_bar = flag_of(game, y_bar);
    std::vector<Vec> verts =
        enumerate_vertices(inverse_flag_polytope(game, mu_bar));
    if (verts.empty()) verts.push_back(y_bar);  // numerical safety net
    for (Vec& v : verts) detail::clip_normalize(v);
    double worst = 0.0;
    for (const Vec& v : verts)
      worst = std::max(worst,
                       target.distance(expected_payoff(game, types[l].action, v)));
    const MinMaxResult best = min_max_distance(game, verts, target, opt);
    out[l].regret = worst - best.delta;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweeps: many (adversary, seed) runs aggregated into per-checkpoint
// statistics. Aggregation order is fixed (adversary-major, then seed), so
// results are deterministic.
// ---------------------------------------------------------------------------

using SigmaFactory = std::function<std::unique_ptr<Player1Strategy>()>;
using TauFactory = std::function<std::unique_ptr<Player2Strategy>()>;

struct NamedAdversary {
  std::string name;
  TauFactory make;
};

struct CheckpointStat {
  std::uint64_t n = 0;
  double mean_d = 0.0;
  double mean_dsq = 0.0;
  double q10 = 0.0, q50 = 0.0, q90 = 0.0;
};

struct RunStats {
  std::vector<std::uint64_t> checkpoints;
  std::vector<std::string> adversary_names;
  // distances[adversary][seed][checkpoint] = d_C(rho_bar_n)
  std::vector<std::vector<std::vector<double>>> distances;
  std::vector<std::vector<CheckpointStat>> per_adversary;
  std::vector<CheckpointStat> pooled;
  // Least-squares slope of log mean d^2 vs log n over pooled checkpoints
  // >= 100; 0 when fewer than two usable points.
  double loglog_slope_dsq = 0.0;
};

namespace detail {

inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

inline CheckpointStat summarize(std::uint64_t n, std::vector<double> vals) {
  CheckpointStat st;
  st.n = n;
  if (vals.empty()) return st;
  KahanSum sum, sumsq;
  for (double v : vals) {
    sum.add(v);
    sumsq.add(v * v);
  }
  const auto m = static_cast<double>(vals.size());
  st.mean_d = sum.sum / m;
  st.mean_dsq = sumsq.sum / m;
  std::sort(vals.begin(), vals.end());
  st.q10 = quantile_sorted(vals, 0.1);
  st.q50 = quantile_sorted(vals, 0.5);
  st.q90 = quantile_sorted(vals, 0.9);
  return st;
}

inline double fit_loglog_slope(const std::vector<CheckpointStat>& pts) {
  std::vector<std::pair<double, double>> xy;
  for (const CheckpointStat& p : pts)
    if (p.n >= 100 && p.mean_dsq > 0.0)
      xy.emplace_back(std::log(static_cast<double>(p.n)),
                      std::log(p.mean_dsq));
  if (xy.size() < 2) return 0.0;
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : xy) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(xy.size());
  my /= static_cast<double>(xy.size());
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : xy) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  return sxx > 0.0 ? sxy / sxx : 0.0;
}

}  // namespace detail

inline RunStats sweep(const GameSpec& game, const ConvexTarget& target,
                      const SigmaFactory& sigma_factory,
                      const std::vector<NamedAdversary>& adversaries,
                      const std::vector<std::uint64_t>& horizons,
                      std::size_t n_seeds, std::uint64_t base_seed = 0) {
  require(!adversaries.empty(), "sweep: no adversaries");
  require(!horizons.empty(), "sweep: no horizons");
  require(n_seeds >= 1, "sweep: need at least one seed");

  RunStats stats;
  stats.checkpoints = horizons;
  std::sort(stats.checkpoints.begin(), stats.checkpoints.end());
  const std::uint64_t max_horizon = stats.checkpoints.back();

  for (const NamedAdversary& adv : adversaries) {
    stats.adversary_names.push_back(adv.name);
    std::vector<std::vector<double>> per_seed;
    per_seed.reserve(n_seeds);
    for (std::size_t s = 0; s < n_seeds; ++s) {
      std::unique_ptr<Player1Strategy> sigma = sigma_factory();
      std::unique_ptr<Player2Strategy> tau = adv.make();
      RunOptions opts;
      opts.horizon = static_cast<std::size_t>(max_horizon);
      opts.seed = base_seed + s;
      opts.record_stages = false;
      opts.checkpoints = stats.checkpoints;
      const Trace tr = run(game, *sigma, *tau, opts);
      std::vector<double> ds;
      ds.reserve(tr.checkpoint_avg.size());
      for (const auto& [n, avg] : tr.checkpoint_avg)
        ds.push_back(target.distance(avg));
      per_seed.push_back(std::move(ds));
    }
    stats.distances.push_back(std::move(per_seed));
  }

  for (std::size_t a = 0; a < stats.distances.size(); ++a) {
    std::vector<CheckpointStat> pts;
    for (std::size_t c = 0; c < stats.checkpoints.size(); ++c) {
      std::vector<double> vals;
      vals.reserve(n_seeds);
      for (const auto& seed_row : stats.distances[a]) vals.push_back(seed_row[c]);
      pts.push_back(detail::summarize(stats.checkpoints[c], std::move(vals)));
    }
    stats.per_adversary.push_back(std::move(pts));
  }
  for (std::size_t c = 0; c < stats.checkpoints.size(); ++c) {
    std::vector<double> vals;
    for (const auto& adv_rows : stats.distances)
      for (const auto& seed_row : adv_rows) vals.push_back(seed_row[c]);
    stats.pooled.push_back(
        detail::summarize(stats.checkpoints[c], std::move(vals)));
  }
  stats.loglog_slope_dsq = detail::fit_loglog_slope(stats.pooled);
  return stats;
}

// Empirical frequency of the checkpointed excursion event
// { d_C(rho_bar_n) >= eta for some n in {N, 2N, 4N, ...} <= horizon }.
inline double excursion_frequency(const GameSpec& game,
                                  const ConvexTarget& target,
                                  const SigmaFactory& sigma_factory,
                                  const TauFactory& tau_factory,
                                  std::size_t n_seeds, std::uint64_t N,
                                  double eta, std::uint64_t horizon,
                                  std::uint64_t base_seed = 0) {
  require(N >= 1 && horizon >= N, "excursion_frequency: bad window");
  std::vector<std::uint64_t> checkpoints;
  for (std::uint64_t n = N; n <= horizon; n *= 2) checkpoints.push_back(n);
  std::size_t hits = 0;
  for (std::size_t s = 0; s < n_seeds; ++s) {
    std::unique_ptr<Player1Strategy> sigma = sigma_factory();
    std::unique_ptr<Player2Strategy> tau = tau_factory();
    RunOptions opts;
    opts.horizon = static_cast<std::size_t>(checkpoints.back());
    opts.seed = base_seed + s;
    opts.record_stages = false;
    opts.checkpoints = checkpoints;
    const Trace tr = run(game, *sigma, *tau, opts);
    for (const auto& [n, avg] : tr.checkpoint_avg)
      if (target.distance(avg) >= eta) {
        ++hits;
        break;
      }
  }
  return static_cast<double>(hits) / static_cast<double>(n_seeds);
}

}  // namespace approach
