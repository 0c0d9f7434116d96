#pragma once

// Playable strategies.
//
// Information structure: Player 1 (the approacher) observes his own action,
// a random signal, and — only where a strategy's contract says so — his
// realized payoff vector, which the engine always delivers and payoff-blind
// strategies ignore. Player 2 has full monitoring: own action, opponent
// action, and the signal.
//
// Strategies are stateful, single-run objects: one instance per run, all
// randomness derived from reset(seed). next_mixed() must be called exactly
// once per stage, before the matching observe().

#include <cstdint>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "approach/common.hpp"
#include "approach/conditions.hpp"
#include "approach/convex.hpp"
#include "approach/game.hpp"
#include "approach/linalg.hpp"
#include "approach/rng.hpp"
#include "approach/solvers.hpp"

namespace approach {

class Player1Strategy {
 public:
  virtual ~Player1Strategy() = default;
  virtual const MixedAction& next_mixed() = 0;
  virtual void observe(std::size_t own_action, std::size_t signal,
                       const Vec& realized_payoff) = 0;
  virtual void reset(std::uint64_t seed) = 0;
  // Stage type for type-based strategies; -1 when the notion does not apply.
  virtual int current_type() const { return -1; }
  // Fixed horizon for finite-horizon constructions; 0 = any horizon.
  virtual std::size_t horizon_hint() const { return 0; }
};

class Player2Strategy {
 public:
  virtual ~Player2Strategy() = default;
  virtual const MixedAction& next_mixed() = 0;
  virtual void observe(std::size_t opponent_action, std::size_t own_action,
                       std::size_t signal) = 0;
  virtual void reset(std::uint64_t seed) = 0;
};

inline MixedAction uniform_mixed(std::size_t n) {
  return MixedAction(n, 1.0 / static_cast<double>(n));
}

// ---------------------------------------------------------------------------
// Stationary play.
// ---------------------------------------------------------------------------

class StationaryP1 final : public Player1Strategy {
 public:
  explicit StationaryP1(MixedAction x) : x_(std::move(x)) {
    require_probability(x_, "StationaryP1");
  }
  const MixedAction& next_mixed() override { return x_; }
  void observe(std::size_t, std::size_t, const Vec&) override {}
  void reset(std::uint64_t) override {}

 private:
  MixedAction x_;
};

class StationaryP2 final : public Player2Strategy {
 public:
  explicit StationaryP2(MixedAction y) : y_(std::move(y)) {
    require_probability(y_, "StationaryP2");
  }
  const MixedAction& next_mixed() override { return y_; }
  void observe(std::size_t, std::size_t, std::size_t) override {}
  void reset(std::uint64_t) override {}

 private:
  MixedAction y_;
};

// ---------------------------------------------------------------------------
// Projection (Blackwell) strategy: play the separating response to the
// running average of realized payoffs.
// ---------------------------------------------------------------------------

class BlackwellStrategy final : public Player1Strategy {
 public:
  BlackwellStrategy(GameSpec game, ConvexTarget target)
      : game_(std::move(game)),
        target_(std::move(target)),
        sum_(game_.payoff_dim()),
        current_(uniform_mixed(game_.num_rows())) {
    require(target_.dim() == game_.payoff_dim(),
            "BlackwellStrategy: dim mismatch");
  }

  const MixedAction& next_mixed() override {
    if (stages_ == 0) {
      current_ = uniform_mixed(game_.num_rows());
    } else {
      current_ = bset_response(game_, target_, sum_.mean(stages_));
    }
    return current_;
  }

  void observe(std::size_t, std::size_t, const Vec& realized_payoff) override {
    sum_.add(realized_payoff);
    ++stages_;
  }

  void reset(std::uint64_t) override {
    sum_ = KahanVecSum(game_.payoff_dim());
    stages_ = 0;
  }

 private:
  GameSpec game_;
  ConvexTarget target_;
  KahanVecSum sum_;
  std::size_t stages_ = 0;
  MixedAction current_;
};

// Payoff-blind variant: feeds the projection response a proxy average built
// from row means (the payoff each action would earn against a uniform
// opponent). Its action law never depends on the opponent, which makes it a
// legitimate probe target for the excluders below.
class BlackwellNaive final : public Player1Strategy {
 public:
  BlackwellNaive(GameSpec game, ConvexTarget target)
      : game_(std::move(game)),
        target_(std::move(target)),
        sum_(game_.payoff_dim()),
        current_(uniform_mixed(game_.num_rows())) {
    require(target_.dim() == game_.payoff_dim(),
            "BlackwellNaive: dim mismatch");
    row_proxy_.resize(game_.num_rows(), Vec(game_.payoff_dim(), 0.0));
    for (std::size_t i = 0; i < game_.num_rows(); ++i) {
      for (std::size_t j = 0; j < game_.num_cols(); ++j)
        axpy(row_proxy_[i], 1.0 / static_cast<double>(game_.num_cols()),
             game_.payoff_vec(i, j));
    }
  }

  const MixedAction& next_mixed() override {
    if (stages_ == 0) {
      current_ = uniform_mixed(game_.num_rows());
    } else {
      current_ = bset_response(game_, target_, sum_.mean(stages_));
    }
    return current_;
  }

  void observe(std::size_t own_action, std::size_t, const Vec&) override {
    sum_.add(row_proxy_[own_action]);
    ++stages_;
  }

  void reset(std::uint64_t) override {
    sum_ = KahanVecSum(game_.payoff_dim());
    stages_ = 0;
  }

 private:
  GameSpec game_;
  ConvexTarget target_;
  std::vector<Vec> row_proxy_;
  KahanVecSum sum_;
  std::size_t stages_ = 0;
  MixedAction current_;
};

// ---------------------------------------------------------------------------
// Calibrated core: the type-based machinery shared by the partial-monitoring
// strategy of either player. A type is a (flag, response) pair; types are
// selected from the invariant distribution of a regret-matching transition
// matrix, flags are estimated by importance weighting under vanishing
// uniform exploration, and pairwise regrets use squared distance to the
// type's flag (linear in the one-hot estimate, so updates are O(|L|)).
// ---------------------------------------------------------------------------

struct CalType {
  Flag mu;             // forecast flag of this type
  MixedAction action;  // response played on stages of this type
  double mu_sq = 0.0;  // cached squared norm of mu
  double deficit = 0.0;  // worst-case target distance of the response at mu
};

class CalibratedCore {
 public:
  CalibratedCore(std::size_t own_actions,
                 std::shared_ptr<const std::vector<CalType>> types,
                 std::uint64_t seed)
      : own_(own_actions), types_(std::move(types)) {
    require(own_ >= 1, "CalibratedCore: no actions");
    require(types_ && !types_->empty(), "CalibratedCore: empty type set");
    const std::size_t L = types_->size();
    regret_.assign(L * L, 0.0);
    lambda_.assign(L, 1.0 / static_cast<double>(L));
    scratch_.assign(L, 0.0);
    reset(seed);
  }

  const MixedAction& next_mixed() {
    const double n = static_cast<double>(stages_ + 1);
    const double gamma = std::min(1.0, std::pow(n, -1.0 / 3.0));
    recompute_invariant();
    pending_type_ = static_cast<int>(rng_.sample(lambda_));
    const MixedAction& x = (*types_)[static_cast<std::size_t>(pending_type_)]
                               .action;
    const double u = gamma / static_cast<double>(own_);
    play_.assign(own_, u);
    for (std::size_t i = 0; i < own_; ++i) play_[i] += (1.0 - gamma) * x[i];
    return play_;
  }

  // One-hot importance-weighted flag estimate: the only nonzero entry of
  // the estimated flag is weight 1/P(own_action) at (own_action, signal).
  void observe_signal(std::size_t own_action, std::size_t signal) {
    const std::size_t L = types_->size();
    const auto l = static_cast<std::size_t>(pending_type_);
    const double w = 1.0 / play_[own_action];
    const double own_inner =
        2.0 * w * (*types_)[l].mu.at(own_action, signal);
    const double own_sq = (*types_)[l].mu_sq;
    for (std::size_t lp = 0; lp < L; ++lp) {
      if (lp == l) continue;
      const double cross =
          2.0 * w * (*types_)[lp].mu.at(own_action, signal);
      // loss(l) - loss(lp) with loss(t) = ||est - mu(t)||^2; the ||est||^2
      // terms cancel.
      regret_[l * L + lp] += (own_sq - own_inner) - ((*types_)[lp].mu_sq -
                                                     cross);
    }
    ++stages_;
    counts_[l] += 1;
  }

  void reset(std::uint64_t seed) {
    rng_.reseed(seed);
    std::fill(regret_.begin(), regret_.end(), 0.0);
    std::fill(lambda_.begin(), lambda_.end(),
              1.0 / static_cast<double>(types_->size()));
    counts_.assign(types_->size(), 0);
    stages_ = 0;
    pending_type_ = -1;
  }

  int current_type() const { return pending_type_; }
  const std::vector<CalType>& types() const { return *types_; }
  const std::vector<std::uint64_t>& type_counts() const { return counts_; }
  double worst_construction_deficit() const {
    double worst = 0.0;
    for (const CalType& t : *types_) worst = std::max(worst, t.deficit);
    return worst;
  }

 private:
  // Invariant distribution of the row-stochastic matrix whose off-diagonal
  // mass is proportional to positive-part regrets; uniform when no regret
  // is positive. Computed by solving the global-balance system exactly
  // (with a vanishing uniform mixing rate for uniqueness); the chain mixes
  // too slowly for per-stage power iteration once regrets accumulate. A
  // warm-started power iteration remains as fallback should the solve ever
  // return a distribution whose balance residual is not small.
  void recompute_invariant() {
    const std::size_t L = types_->size();
    if (L == 1) {
      lambda_[0] = 1.0;
      return;
    }
    double c = 0.0;
    for (std::size_t l = 0; l < L; ++l) {
      double row = 0.0;
      for (std::size_t lp = 0; lp < L; ++lp)
        if (lp != l) row += std::max(0.0, regret_[l * L + lp]);
      c = std::max(c, row);
    }
    if (c <= 0.0) {
      std::fill(lambda_.begin(), lambda_.end(),
                1.0 / static_cast<double>(L));
      return;
    }

    DenseMatrix rates(L, L);
    for (std::size_t l = 0; l < L; ++l)
      for (std::size_t lp = 0; lp < L; ++lp)
        rates.at(l, lp) = lp == l ? 0.0 : std::max(0.0, regret_[l * L + lp]);
    Vec pi = stationary_distribution(rates, tol::chain_mixing);
    if (balance_residual(pi, c) <= 1e-6) {
      lambda_ = std::move(pi);
      return;
    }

    for (int it = 0; it < 500; ++it) {
      std::fill(scratch_.begin(), scratch_.end(), 0.0);
      for (std::size_t l = 0; l < L; ++l) {
        const double* row = &regret_[l * L];
        double outflow = 0.0;
        for (std::size_t lp = 0; lp < L; ++lp) {
          if (lp == l) continue;
          const double q = std::max(0.0, row[lp]) / c;
          scratch_[lp] += lambda_[l] * q;
          outflow += q;
        }
        scratch_[l] += lambda_[l] * (1.0 - outflow);
      }
      double diff = 0.0;
      for (std::size_t l = 0; l < L; ++l)
        diff += std::abs(scratch_[l] - lambda_[l]);
      lambda_.swap(scratch_);
      if (diff <= tol::power_iteration) break;
    }
    double s = 0.0;
    for (double v : lambda_) s += v;
    for (double& v : lambda_) v /= s;
  }

  // L1 norm of pi P - pi for the transition matrix P built from positive
  // regrets normalized by c; zero exactly when pi is invariant.
  double balance_residual(const Vec& pi, double c) const {
    const std::size_t L = types_->size();
    double res = 0.0;
    for (std::size_t lp = 0; lp < L; ++lp) {
      double net = 0.0;
      for (std::size_t l = 0; l < L; ++l) {
        if (l == lp) continue;
        net += pi[l] * std::max(0.0, regret_[l * L + lp]) -
               pi[lp] * std::max(0.0, regret_[lp * L + l]);
      }
      res += std::abs(net) / c;
    }
    return res;
  }

  std::size_t own_;
  std::shared_ptr<const std::vector<CalType>> types_;
  Rng rng_;
  std::vector<double> regret_;  // L x L cumulated pairwise regrets
  Vec lambda_;
  Vec scratch_;
  std::vector<std::uint64_t> counts_;
  MixedAction play_;
  std::size_t stages_ = 0;
  int pending_type_ = -1;
};

// Builds the type set for the approacher of `game`: flags of a simplex mesh
// over opponent mixtures, thinned greedily to an epsilon/2-separated net,
// each with the response minimizing the worst compatible target distance.
inline std::shared_ptr<const std::vector<CalType>> build_calibrated_types(
    const GameSpec& game, const ConvexTarget& target, double epsilon,
    const SimplexMinOptions& opt = {}) {
  require(epsilon > 0.0, "calibrated types: epsilon must be positive");
  require(target.dim() == game.payoff_dim(), "calibrated types: dim mismatch");
  const double want =
      4.0 * std::sqrt(static_cast<double>(game.num_rows())) / epsilon;
  const auto divisions =
      static_cast<std::size_t>(std::clamp(std::ceil(want), 8.0, 200.0));

  std::vector<Flag> net;
  for (const Vec& y : simplex_grid(game.num_cols(), divisions)) {
    Flag f = flag_of(game, y);
    bool close = false;
    for (const Flag& kept : net)
      if (flag_distance(kept, f) <= epsilon / 2.0) {
        close = true;
        break;
      }
    if (!close) net.push_back(std::move(f));
  }

  auto types = std::make_shared<std::vector<CalType>>();
  types->reserve(net.size());
  for (Flag& mu : net) {
    std::vector<Vec> verts =
        enumerate_vertices(inverse_flag_polytope(game, mu));
    require(!verts.empty(), "calibrated types: empty inverse polytope");
    MinMaxResult r = min_max_distance(game, verts, target, opt);
    CalType t;
    t.mu_sq = dot(mu.data, mu.data);
    t.mu = std::move(mu);
    t.action = std::move(r.x);
    t.deficit = r.delta;
    types->push_back(std::move(t));
  }
  return types;
}

class CalibratedStrategy final : public Player1Strategy {
 public:
  CalibratedStrategy(GameSpec game,
                     std::shared_ptr<const std::vector<CalType>> types,
                     std::uint64_t seed)
      : game_(std::move(game)),
        core_(game_.num_rows(), std::move(types), seed) {}

  CalibratedStrategy(GameSpec game, const ConvexTarget& target,
                     double epsilon, std::uint64_t seed)
      : CalibratedStrategy(game, build_calibrated_types(game, target, epsilon),
                           seed) {}

  const MixedAction& next_mixed() override { return core_.next_mixed(); }
  void observe(std::size_t own_action, std::size_t signal,
               const Vec&) override {
    core_.observe_signal(own_action, signal);
  }
  void reset(std::uint64_t seed) override { core_.reset(seed); }
  int current_type() const override { return core_.current_type(); }

  const std::vector<CalType>& types() const { return core_.types(); }
  const std::vector<std::uint64_t>& type_counts() const {
    return core_.type_counts();
  }
  // True when some type's response leaves the target unreachable: the
  // consistency contract then carries no approachability guarantee.
  bool no_guarantee(double tolerance = tol::optimizer) const {
    return core_.worst_construction_deficit() > tolerance;
  }

 private:
  GameSpec game_;
  CalibratedCore core_;
};

// ---------------------------------------------------------------------------
// Doubling wrapper: runs the epsilon_k = 2^-k strategy on block k of length
// 64 * 4^k, so earlier blocks' contamination of the running average decays
// geometrically and the wrapped strategy is anytime-convergent.
// ---------------------------------------------------------------------------

class DoublingWrap final : public Player1Strategy {
 public:
  using Factory = std::function<std::unique_ptr<Player1Strategy>(double)>;

  explicit DoublingWrap(Factory factory, double epsilon_floor = 1.0 / 64.0,
                        std::size_t base_block = 64)
      : factory_(std::move(factory)),
        epsilon_floor_(epsilon_floor),
        base_block_(base_block) {
    require(static_cast<bool>(factory_), "DoublingWrap: missing factory");
    require(base_block_ >= 1, "DoublingWrap: base block must be positive");
    reset(0);
  }

  const MixedAction& next_mixed() override { return inner_->next_mixed(); }

  void observe(std::size_t own_action, std::size_t signal,
               const Vec& realized_payoff) override {
    inner_->observe(own_action, signal, realized_payoff);
    ++in_block_;
    if (in_block_ >= block_len_) start_block(block_ + 1);
  }

  void reset(std::uint64_t seed) override {
    seed_ = seed;
    start_block(0);
  }

  int current_type() const override { return inner_->current_type(); }
  std::size_t current_block() const { return block_; }
  double current_epsilon() const { return epsilon_; }

 private:
  void start_block(std::size_t k) {
    block_ = k;
    epsilon_ = std::max(epsilon_floor_, std::pow(2.0, -static_cast<double>(k)));
    block_len_ = base_block_;
    for (std::size_t q = 0; q < k; ++q) block_len_ *= 4;
    inner_ = factory_(epsilon_);
    require(inner_ != nullptr, "DoublingWrap: factory returned null");
    inner_->reset(derive_seed(seed_, k + 1));
    in_block_ = 0;
  }

  Factory factory_;
  double epsilon_floor_;
  std::size_t base_block_;
  std::uint64_t seed_ = 0;
  std::unique_ptr<Player1Strategy> inner_;
  std::size_t block_ = 0;
  std::size_t block_len_ = 0;
  std::size_t in_block_ = 0;
  double epsilon_ = 1.0;
};

// ---------------------------------------------------------------------------
// Probing: the law of Player 1's actions does not depend on the opponent
// when every opponent strategy induces the same flags (e.g. a single flag,
// or a stationary opponent inside one inverse polytope). The excluders
// below therefore estimate Player 1's expected action frequencies by
// Monte-Carlo rollouts against a fixed compatible column.
// ---------------------------------------------------------------------------

using P1Factory = std::function<std::unique_ptr<Player1Strategy>()>;

// Mean action-frequency vector of `factory`'s strategy at the given horizon,
// averaged over `runs` rollouts against the stationary column y.
inline Vec probe_action_frequency(const GameSpec& game, const P1Factory& factory,
                                  const MixedAction& y, std::size_t horizon,
                                  int runs, std::uint64_t seed) {
  require(horizon >= 1, "probe: horizon must be positive");
  require(runs >= 1, "probe: need at least one rollout");
  Vec freq(game.num_rows(), 0.0);
  Vec payoff(game.payoff_dim());
  for (int r = 0; r < runs; ++r) {
    std::unique_ptr<Player1Strategy> s1 = factory();
    s1->reset(derive_seed(seed, 2 * static_cast<std::uint64_t>(r)));
    Rng rng(derive_seed(seed, 2 * static_cast<std::uint64_t>(r) + 1));
    for (std::size_t n = 0; n < horizon; ++n) {
      const MixedAction& x = s1->next_mixed();
      const auto i = static_cast<std::size_t>(rng.sample(x));
      const auto j = static_cast<std::size_t>(rng.sample(y));
      const auto s = static_cast<std::size_t>(sample_signal(game, i, j, rng));
      const double* p = game.payoff(i, j);
      payoff.assign(p, p + game.payoff_dim());
      s1->observe(i, s, payoff);
      freq[i] += 1.0;
    }
  }
  const double scale = 1.0 / (static_cast<double>(runs) *
                              static_cast<double>(horizon));
  for (double& f : freq) f *= scale;
  return freq;
}

// Horizon-indexed exclusion strategy: probe the opponent's expected action
// frequencies, then play the constant compatible column pushing the payoff
// farthest from the target. Requires a not-approachable certificate.
class BestResponseExcluder final : public Player2Strategy {
 public:
  BestResponseExcluder(GameSpec game, ConvexTarget target,
                       const Certificate& cert, P1Factory opponent,
                       std::size_t horizon, int probe_runs = 200,
                       std::uint64_t seed = 0)
      : game_(std::move(game)), y_(uniform_mixed(game_.num_cols())) {
    require(!cert.approachable(),
            "BestResponseExcluder: target is approachable");
    require(cert.failing_flag.has_value(),
            "BestResponseExcluder: certificate lacks a failing flag");
    std::vector<Vec> verts;
    if (cert.monitoring == MonitoringKind::kFull) {
      // Full-monitoring flags embed the excluding mixture directly.
      Vec y0(cert.failing_flag->cols);
      for (std::size_t j = 0; j < y0.size(); ++j)
        y0[j] = cert.failing_flag->at(0, j);
      verts.push_back(std::move(y0));
    } else {
      verts = enumerate_vertices(
          inverse_flag_polytope(game_, *cert.failing_flag));
    }
    require(!verts.empty(), "BestResponseExcluder: empty inverse polytope");
    for (Vec& v : verts) detail::clip_normalize(v);

    Vec xbar = probe_action_frequency(game_, opponent, verts.front(), horizon,
                                      probe_runs, derive_seed(seed, 17));
    double best = -1.0;
    for (const Vec& v : verts) {  // ties keep the first vertex
      double d = target.distance(expected_payoff(game_, xbar, v));
      if (d > best + 1e-12) {
        best = d;
        y_ = v;
      }
    }
  }

  const MixedAction& next_mixed() override { return y_; }
  void observe(std::size_t, std::size_t, std::size_t) override {}
  void reset(std::uint64_t) override {}
  const MixedAction& chosen_column() const { return y_; }

 private:
  GameSpec game_;
  MixedAction y_;
};

// Two-by-two interval excluder: probe the opponent's frequency of the second
// row; below the threshold play the second column forever, otherwise the
// first. With the threshold 1/4 this is the exclusion rule whose payoff
// stays a quarter away from [0, 1/2] in the signalless example game.
class ThresholdExcluder final : public Player2Strategy {
 public:
  ThresholdExcluder(GameSpec game, P1Factory opponent, std::size_t horizon,
                    double threshold = 0.25, int probe_runs = 200,
                    std::uint64_t seed = 0)
      : y_(2, 0.0) {
    require(game.num_rows() == 2 && game.num_cols() == 2,
            "ThresholdExcluder: needs a 2x2 game");
    Vec probe_col{1.0, 0.0};
    Vec xbar = probe_action_frequency(game, opponent, probe_col, horizon,
                                      probe_runs, derive_seed(seed, 29));
    const std::size_t column = xbar[1] < threshold ? 1 : 0;
    y_[column] = 1.0;
  }

  const MixedAction& next_mixed() override { return y_; }
  void observe(std::size_t, std::size_t, std::size_t) override {}
  void reset(std::uint64_t) override {}
  const MixedAction& chosen_column() const { return y_; }

 private:
  MixedAction y_;
};

// ---------------------------------------------------------------------------
// Counterexample constructions for the 2x2 signalless game with payoffs
//   row 0 (T): 0, 1     row 1 (B): -1, 0
// ---------------------------------------------------------------------------

// Deterministic block schedule: block p has length p^(2p+1); odd blocks play
// the second row (payoffs <= 0), even blocks the first (payoffs >= 0), so
// the running average ends odd blocks at most 1/p and even blocks at least
// -1/p regardless of the opponent.
class BlockStrategy final : public Player1Strategy {
 public:
  explicit BlockStrategy(int max_p) {
    require(max_p >= 1 && max_p <= 5, "BlockStrategy: max_p must be in [1,5]");
    std::uint64_t cum = 0;
    for (int p = 1; p <= max_p; ++p) {
      std::uint64_t len = 1;
      for (int e = 0; e < 2 * p + 1; ++e) len *= static_cast<std::uint64_t>(p);
      cum += len;
      block_ends_.push_back(cum);
    }
    top_ = {1.0, 0.0};
    bottom_ = {0.0, 1.0};
  }

  const MixedAction& next_mixed() override {
    std::size_t p = 1;
    while (p <= block_ends_.size() && stage_ >= block_ends_[p - 1]) ++p;
    if (p > block_ends_.size()) p = block_ends_.size();  // past the schedule
    return (p % 2 == 1) ? bottom_ : top_;
  }

  void observe(std::size_t, std::size_t, const Vec&) override { ++stage_; }
  void reset(std::uint64_t) override { stage_ = 0; }
  std::size_t horizon_hint() const override {
    return static_cast<std::size_t>(block_ends_.back());
  }
  const std::vector<std::uint64_t>& block_ends() const { return block_ends_; }

 private:
  std::vector<std::uint64_t> block_ends_;
  std::uint64_t stage_ = 0;
  MixedAction top_, bottom_;
};

// Finite-horizon randomized construction: phase 1 plays the first row; each
// later phase guesses the cell of the running average (uniformly, so the
// play never reads the opponent's strategy) and mixes in the second row
// with the matching probability. With probability at least 1/(2M^3) for
// k = 2 the final average lands within 2/M of [0, 1/k].
class WeakApproachStrategy final : public Player1Strategy {
 public:
  WeakApproachStrategy(int k, int M, std::size_t horizon_block,
                       std::uint64_t seed)
      : k_(k), M_(M), block_(horizon_block) {
    require(k == 2 || k == 3, "WeakApproachStrategy: k must be 2 or 3");
    require(M >= 2, "WeakApproachStrategy: M must be at least 2");
    require(horizon_block >= 1000,
            "WeakApproachStrategy: phase length must be at least 1000");
    reset(seed);
  }

  const MixedAction& next_mixed() override { return mix_; }

  void observe(std::size_t, std::size_t, const Vec&) override {
    ++stage_;
    if (stage_ % block_ == 0) advance_phase();
  }

  void reset(std::uint64_t seed) override {
    rng_.reseed(seed);
    stage_ = 0;
    phase_ = 1;
    mix_ = {1.0, 0.0};  // first phase: pure first row
  }

  std::size_t horizon_hint() const override {
    return static_cast<std::size_t>(k_) * block_;
  }

 private:
  void advance_phase() {
    ++phase_;
    if (phase_ > k_) return;  // horizon reached; keep last mixture
    double q = 0.0;
    if (phase_ == 2) {
      const auto k1 = static_cast<double>(1 + rng_.next_int(M_));
      q = k1 / static_cast<double>(M_);
    } else {
      // Cells of the two-phase average reach only up to about 1/2, so the
      // third-phase guess ranges over ceil(M/2) + 1 cells.
      const int hi = (M_ + 1) / 2 + 1;
      const auto k2 = static_cast<double>(1 + rng_.next_int(hi));
      q = std::min(1.0, 2.0 * k2 / static_cast<double>(M_));
    }
    mix_ = {1.0 - q, q};
  }

  int k_;
  int M_;
  std::size_t block_;
  Rng rng_;
  std::uint64_t stage_ = 0;
  int phase_ = 1;
  MixedAction mix_;
};

}  // namespace approach
