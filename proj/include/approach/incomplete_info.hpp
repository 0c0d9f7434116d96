#pragma once

// Zero-sum repeated games with incomplete information on one side. Nature
// draws a state k once, tells the (row) informed player, and the (column)
// uninformed player sees only her own action and a per-stage signal whose
// law depends on the state and the joint action. The uninformed player's
// long-run guarantee is Cav(u)(p): u(p) is the value restricted to
// non-revealing strategies, and its concavification is computed by LP over
// a prior grid. The guarantee is realized by approaching the orthant
// m + R_- in an auxiliary vector-payoff game whose approacher is the
// uninformed player with one payoff component per state.
//
// Orientation note: the uninformed player acts like the approacher of the
// rest of the library, so each state is stored as a transposed GameSpec
// (rows = uninformed actions, columns = informed actions). Flags are then
// J x S matrices and all polytope machinery applies unchanged.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "approach/common.hpp"
#include "approach/convex.hpp"
#include "approach/game.hpp"
#include "approach/lp.hpp"
#include "approach/polytope.hpp"
#include "approach/rng.hpp"
#include "approach/solvers.hpp"
#include "approach/strategies.hpp"

namespace approach {

inline constexpr double kMinusInfinity = -std::numeric_limits<double>::infinity();

class IIGame {
 public:
  // payoffs[k][i][j]: scalar payoff (to the informed maximizer) in state k;
  // signals[k][i][j]: probability vector over the signal alphabet.
  IIGame(Vec prior, std::vector<std::vector<Vec>> payoffs,
         std::vector<std::vector<std::vector<Vec>>> signals)
      : prior_(std::move(prior)) {
    require_probability(prior_, "IIGame: prior");
    K_ = prior_.size();
    require(payoffs.size() == K_ && signals.size() == K_,
            "IIGame: state count mismatch");
    require(!payoffs[0].empty() && !payoffs[0][0].empty(),
            "IIGame: empty payoff matrix");
    I_ = payoffs[0].size();
    J_ = payoffs[0][0].size();
    for (std::size_t k = 0; k < K_; ++k) {
      require(payoffs[k].size() == I_, "IIGame: ragged payoffs");
      // Transposed orientation: row j, column i.
      std::vector<std::vector<Vec>> tp(J_, std::vector<Vec>(I_));
      std::vector<std::vector<Vec>> ts(J_, std::vector<Vec>(I_));
      for (std::size_t i = 0; i < I_; ++i) {
        require(payoffs[k][i].size() == J_ && signals[k][i].size() == J_,
                "IIGame: ragged state tables");
        for (std::size_t j = 0; j < J_; ++j) {
          tp[j][i] = Vec{payoffs[k][i][j]};
          ts[j][i] = signals[k][i][j];
          A_ = std::max(A_, std::abs(payoffs[k][i][j]));
        }
      }
      transposed_.emplace_back(std::move(tp), std::move(ts));
    }
    S_ = transposed_[0].num_signals();
  }

  std::size_t num_states() const { return K_; }
  std::size_t num_rows() const { return I_; }  // informed player's actions
  std::size_t num_cols() const { return J_; }  // uninformed player's actions
  std::size_t num_signals() const { return S_; }
  const Vec& prior() const { return prior_; }
  double payoff(std::size_t k, std::size_t i, std::size_t j) const {
    return transposed_[k].payoff(j, i)[0];
  }
  // max_k ||rho^k||_inf, the penalty constant of the auxiliary game.
  double payoff_bound() const { return A_; }
  // State k as a GameSpec whose "player 1" is the uninformed player.
  const GameSpec& transposed(std::size_t k) const { return transposed_[k]; }

  // Flag of the informed player's mixture x in state k: row j is the signal
  // law the uninformed player faces after playing j.
  Flag state_flag(std::size_t k, const MixedAction& x) const {
    return flag_of(transposed_[k], x);
  }

 private:
  Vec prior_;
  std::size_t K_ = 0, I_ = 0, J_ = 0, S_ = 0;
  double A_ = 0.0;
  std::vector<GameSpec> transposed_;
};

// ---------------------------------------------------------------------------
// Non-revealing strategy profiles and the restricted value u.
// ---------------------------------------------------------------------------

// { x = (x^1..x^K) in Delta(I)^K : state_flag(k, x^k) = mu for all k with
// p^k > 0 }, as an H-polytope over R^{K*I}.
inline HPolytope nr_polytope(const IIGame& g, const Vec& p, const Flag& mu) {
  require(p.size() == g.num_states(), "nr_polytope: prior length");
  require(mu.rows == g.num_cols() && mu.cols == g.num_signals(),
          "nr_polytope: flag shape");
  const std::size_t K = g.num_states(), I = g.num_rows();
  HPolytope P = HPolytope::empty_like(K * I);
  P.known_bounded = true;
  for (std::size_t k = 0; k < K; ++k) {
    Vec row(K * I, 0.0);
    for (std::size_t i = 0; i < I; ++i) row[k * I + i] = 1.0;
    P.add_equality(row, 1.0);
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (p[k] <= 0.0) continue;
    const GameSpec& t = g.transposed(k);
    for (std::size_t j = 0; j < g.num_cols(); ++j)
      for (std::size_t s = 0; s < g.num_signals(); ++s) {
        Vec row(K * I, 0.0);
        for (std::size_t i = 0; i < I; ++i)
          row[k * I + i] = t.signal_row(j, i)[s];
        P.add_equality(row, mu.at(j, s));
      }
  }
  for (std::size_t v = 0; v < K * I; ++v) {
    Vec row(K * I, 0.0);
    row[v] = -1.0;
    P.add_inequality(row, 0.0);
  }
  return P;
}

// Value of the one-shot game where the informed player is restricted to
// NR(p, mu) and payoffs are averaged by the prior: a single epigraph LP
// max t s.t. t <= sum_k p^k rho^k(x^k, j) for every pure j, x in NR(p, mu).
// -infinity when the restriction is infeasible.
inline double u_value(const IIGame& g, const Vec& p, const Flag& mu) {
  const std::size_t K = g.num_states(), I = g.num_rows(), J = g.num_cols();
  const HPolytope nr = nr_polytope(g, p, mu);
  // Variables: x in R^{K*I} (x >= 0 is built into standard form), then
  // t' = t + A + 1 >= 0. NR equalities become inequality pairs.
  const std::size_t nv = K * I + 1;
  const double shift = g.payoff_bound() + 1.0;
  const std::size_t ne = nr.a_eq.rows;
  DenseMatrix A(2 * ne + J, nv);
  Vec b(2 * ne + J, 0.0);
  for (std::size_t r = 0; r < ne; ++r) {
    for (std::size_t v = 0; v < K * I; ++v) {
      A.at(2 * r, v) = nr.a_eq.at(r, v);
      A.at(2 * r + 1, v) = -nr.a_eq.at(r, v);
    }
    b[2 * r] = nr.b_eq[r];
    b[2 * r + 1] = -nr.b_eq[r];
  }
  for (std::size_t j = 0; j < J; ++j) {
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t i = 0; i < I; ++i)
        A.at(2 * ne + j, k * I + i) = -p[k] * g.payoff(k, i, j);
    A.at(2 * ne + j, K * I) = 1.0;
    b[2 * ne + j] = shift;
  }
  Vec c(nv, 0.0);
  c[K * I] = 1.0;
  const LpResult lp = SimplexTableau::solve(A, b, c);
  if (lp.status != LpStatus::kOptimal) return kMinusInfinity;
  return lp.value - shift;
}

namespace detail {

inline std::size_t mesh_divisions(double mesh) {
  return static_cast<std::size_t>(
      std::max(1L, std::lround(1.0 / mesh)));
}

inline void dedup_flags(std::vector<Flag>& flags) {
  std::vector<Flag> kept;
  for (Flag& f : flags) {
    bool dup = false;
    for (const Flag& k : kept)
      if (norm_inf(sub(k.data, f.data)) <= tol::flag_dedup) {
        dup = true;
        break;
      }
    if (!dup) kept.push_back(std::move(f));
  }
  flags = std::move(kept);
}

}  // namespace detail

struct UValueAtP {
  double value = kMinusInfinity;  // u(p)
  Flag best_flag;                 // argmax flag when feasible
  bool feasible = false;
};

// u(p) = max over candidate non-revealing flags mu of u_value(p, mu). The
// candidate grid is the image of a Delta(I)-mesh through every supported
// state's flag map (deduplicated) — infeasible candidates drop out through
// the -infinity tag — plus the flag of the best mixture of the
// prior-averaged game when its per-state flags agree, so priors whose
// optimum is non-revealing are hit exactly rather than up to the mesh.
inline UValueAtP u_of_p(const IIGame& g, const Vec& p, double mesh = 0.125) {
  require(mesh > 0.0 && mesh <= 1.0, "u_of_p: mesh must be in (0, 1]");
  require(p.size() == g.num_states(), "u_of_p: prior length");
  const std::size_t K = g.num_states(), I = g.num_rows();
  std::size_t k0 = K;
  for (std::size_t k = 0; k < K; ++k)
    if (p[k] > 0.0) {
      k0 = k;
      break;
    }
  require(k0 < K, "u_of_p: prior has no support");

  std::vector<Flag> candidates;
  const std::size_t divisions = detail::mesh_divisions(mesh);
  for (std::size_t k = 0; k < K; ++k) {
    if (p[k] <= 0.0) continue;
    for (const Vec& x : simplex_grid(I, divisions))
      candidates.push_back(g.state_flag(k, x));
  }
  // Best mixture of the prior-averaged game, when it is non-revealing.
  {
    DenseMatrix avg(I, g.num_cols());
    for (std::size_t i = 0; i < I; ++i)
      for (std::size_t j = 0; j < g.num_cols(); ++j) {
        double acc = 0.0;
        for (std::size_t k = 0; k < K; ++k)
          acc += p[k] * g.payoff(k, i, j);
        avg.at(i, j) = acc;
      }
    MixedAction xstar = matrix_game_value(avg).x;
    bool agrees = true;
    const Flag f0 = g.state_flag(k0, xstar);
    for (std::size_t k = k0 + 1; k < K; ++k)
      if (p[k] > 0.0 &&
          norm_inf(sub(g.state_flag(k, xstar).data, f0.data)) > 1e-9) {
        agrees = false;
        break;
      }
    if (agrees) candidates.push_back(f0);
  }
  detail::dedup_flags(candidates);

  UValueAtP out;
  for (Flag& mu : candidates) {
    const double v = u_value(g, p, mu);
    if (v > out.value) {
      out.value = v;
      out.best_flag = std::move(mu);
      out.feasible = true;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Concavification over a prior grid, with the supporting hyperplane m.
// ---------------------------------------------------------------------------

struct CavResult {
  double value = kMinusInfinity;  // Cav(u)(p) on the grid
  double u_at_p = kMinusInfinity;
  Vec m;  // supporting hyperplane: u(q) <= <m, q> for grid q, <m, p> = value
  std::vector<std::pair<Vec, double>> grid;  // (q, u(q)) with u(q) finite
};

inline CavResult cav_u(const IIGame& g, const Vec& p,
                       std::size_t prior_divisions = 16, double mesh = 0.125) {
  require(p.size() == g.num_states(), "cav_u: prior length");
  require_probability(p, "cav_u: prior");
  require(prior_divisions >= 1, "cav_u: prior divisions");

  CavResult out;
  std::vector<Vec> grid = simplex_grid(g.num_states(), prior_divisions);
  bool has_p = false;
  for (const Vec& q : grid)
    if (norm_inf(sub(q, p)) <= 1e-12) has_p = true;
  if (!has_p) grid.push_back(p);

  for (const Vec& q : grid) {
    const UValueAtP uq = u_of_p(g, q, mesh);
    if (uq.feasible) out.grid.emplace_back(q, uq.value);
    if (norm_inf(sub(q, p)) <= 1e-12) out.u_at_p = uq.value;
  }
  // u infeasible on the whole grid: Cav(u) is -infinity everywhere.
  if (out.grid.empty()) return out;

  const std::size_t N = out.grid.size();
  const std::size_t K = g.num_states();

  // Primal: max sum lambda_i u_i s.t. sum lambda_i q_i = p, sum lambda = 1.
  {
    DenseMatrix A(2 * K + 2, N);
    Vec b(2 * K + 2, 0.0), c(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
      c[i] = out.grid[i].second;
      for (std::size_t k = 0; k < K; ++k) {
        A.at(2 * k, i) = out.grid[i].first[k];
        A.at(2 * k + 1, i) = -out.grid[i].first[k];
      }
      A.at(2 * K, i) = 1.0;
      A.at(2 * K + 1, i) = -1.0;
    }
    for (std::size_t k = 0; k < K; ++k) {
      b[2 * k] = p[k];
      b[2 * k + 1] = -p[k];
    }
    b[2 * K] = 1.0;
    b[2 * K + 1] = -1.0;
    const LpResult lp = SimplexTableau::solve(A, b, c);
    require(lp.status == LpStatus::kOptimal,
            "cav_u: concavification LP failed");
    out.value = lp.value;
  }

  // Dual, solved directly for the hyperplane: min <m, p> s.t. <m, q_i> >= u_i
  // (the sum-to-one multiplier is folded into m since the q_i are priors).
  {
    DenseMatrix A(N, 2 * K);
    Vec b(N, 0.0), c(2 * K, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t k = 0; k < K; ++k) {
        A.at(i, k) = -out.grid[i].first[k];
        A.at(i, K + k) = out.grid[i].first[k];
      }
      b[i] = -out.grid[i].second;
    }
    for (std::size_t k = 0; k < K; ++k) {
      c[k] = -p[k];
      c[K + k] = p[k];
    }
    const LpResult lp = SimplexTableau::solve(A, b, c);
    require(lp.status == LpStatus::kOptimal, "cav_u: hyperplane LP failed");
    out.m.assign(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) out.m[k] = lp.x[k] - lp.x[K + k];
    require(std::abs(-lp.value - out.value) <= 1e-6,
            "cav_u: duality gap exceeded tolerance");
  }
  return out;
}

// ---------------------------------------------------------------------------
// The auxiliary vector-payoff game and its target orthant.
// ---------------------------------------------------------------------------

struct AuxiliaryGame {
  GameSpec composite;  // approacher rows = J; columns = informed profiles I^K
  double A = 0.0;      // penalty constant
  Vec m;               // hyperplane defining the orthant
  ConvexTarget target; // box clipped to [-A-1, A+1]^K with top corner m
  std::vector<std::vector<std::size_t>> profiles;  // column -> (i^1..i^K)
};

inline AuxiliaryGame auxiliary_game(const IIGame& g, const Vec& m) {
  require(m.size() == g.num_states(), "auxiliary_game: m length");
  const std::size_t K = g.num_states(), I = g.num_rows(), J = g.num_cols();
  const double A = g.payoff_bound();

  std::size_t cols = 1;
  for (std::size_t k = 0; k < K; ++k) cols *= I;

  std::vector<std::vector<std::size_t>> profiles(cols,
                                                 std::vector<std::size_t>(K));
  for (std::size_t c = 0; c < cols; ++c) {
    std::size_t rem = c;
    for (std::size_t k = K; k-- > 0;) {
      profiles[c][k] = rem % I;
      rem /= I;
    }
  }

  std::vector<std::vector<Vec>> payoffs(J, std::vector<Vec>(cols));
  std::vector<std::vector<Vec>> signals(J, std::vector<Vec>(cols));
  for (std::size_t j = 0; j < J; ++j)
    for (std::size_t c = 0; c < cols; ++c) {
      Vec pay(K, 0.0);
      Vec sig(g.num_signals(), 0.0);
      for (std::size_t k = 0; k < K; ++k) {
        pay[k] = g.payoff(k, profiles[c][k], j);
        axpy(sig, g.prior()[k],
             Vec(g.transposed(k).signal_row(j, profiles[c][k]),
                 g.transposed(k).signal_row(j, profiles[c][k]) +
                     g.num_signals()));
      }
      payoffs[j][c] = std::move(pay);
      signals[j][c] = std::move(sig);
    }

  Vec lo(K, -(A + 1.0)), hi(K, 0.0);
  for (std::size_t k = 0; k < K; ++k)
    hi[k] = std::clamp(m[k], -(A + 1.0), A + 1.0);

  AuxiliaryGame aux{GameSpec(std::move(payoffs), std::move(signals)), A, m,
                    ConvexTarget::box(std::move(lo), std::move(hi)),
                    std::move(profiles)};
  return aux;
}

// Approachability scan of the orthant in the auxiliary game. A realizable
// flag always belongs to some state's flag range; for each grid flag the
// response minimizes the euclidean excess of the per-active-state suprema
// omega_k(y) = max { rho^k(x, y) : state_flag(k, x) = mu } over the orthant
// corner. The witnesses double as the type set of the uninformed player's
// calibrated strategy.
struct AuxCheck {
  double deficit = 0.0;  // max over grid flags of the minimized excess
  std::shared_ptr<const std::vector<CalType>> types;
};

inline AuxCheck check_auxiliary(const IIGame& g, const Vec& corner,
                                double mesh = 0.125,
                                const SimplexMinOptions& opt = {}) {
  require(corner.size() == g.num_states(), "check_auxiliary: corner length");
  require(mesh > 0.0 && mesh <= 1.0, "check_auxiliary: mesh");
  const std::size_t K = g.num_states(), I = g.num_rows(), J = g.num_cols();
  const std::size_t divisions = detail::mesh_divisions(mesh);

  std::vector<Flag> grid;
  for (std::size_t k = 0; k < K; ++k)
    for (const Vec& x : simplex_grid(I, divisions))
      grid.push_back(g.state_flag(k, x));
  detail::dedup_flags(grid);

  AuxCheck out;
  auto types = std::make_shared<std::vector<CalType>>();
  for (Flag& mu : grid) {
    // Per-state payoff rows w[j] = rho^k(v, e_j) for each inverse-polytope
    // vertex v of every state containing the flag.
    std::vector<std::vector<Vec>> state_rows;  // [active state][vertex] -> R^J
    std::vector<double> state_corner;
    for (std::size_t k = 0; k < K; ++k) {
      std::vector<Vec> verts =
          enumerate_vertices(inverse_flag_polytope(g.transposed(k), mu));
      if (verts.empty()) continue;
      std::vector<Vec> rows;
      rows.reserve(verts.size());
      for (Vec& v : verts) {
        detail::clip_normalize(v);
        Vec w(J, 0.0);
        for (std::size_t j = 0; j < J; ++j)
          for (std::size_t i = 0; i < I; ++i)
            w[j] += v[i] * g.payoff(k, i, j);
        rows.push_back(std::move(w));
      }
      state_rows.push_back(std::move(rows));
      state_corner.push_back(corner[k]);
    }
    require(!state_rows.empty(),
            "check_auxiliary: grid flag outside every state's range");

    auto omega = [&](const Vec& y, std::size_t a, std::size_t* arg) {
      double best = -1e300;
      for (std::size_t v = 0; v < state_rows[a].size(); ++v) {
        const double val = dot(state_rows[a][v], y);
        if (val > best) {
          best = val;
          if (arg) *arg = v;
        }
      }
      return best;
    };
    auto f = [&](const Vec& y) {
      double acc = 0.0;
      for (std::size_t a = 0; a < state_rows.size(); ++a) {
        const double e = std::max(0.0, omega(y, a, nullptr) - state_corner[a]);
        acc += e * e;
      }
      return std::sqrt(acc);
    };
    auto fg = [&](const Vec& y, Vec& grad) {
      grad.assign(J, 0.0);
      double acc = 0.0;
      std::vector<std::pair<double, std::size_t>> ex(state_rows.size());
      for (std::size_t a = 0; a < state_rows.size(); ++a) {
        std::size_t arg = 0;
        const double e = std::max(0.0, omega(y, a, &arg) - state_corner[a]);
        ex[a] = {e, arg};
        acc += e * e;
      }
      const double val = std::sqrt(acc);
      if (val > 1e-14)
        for (std::size_t a = 0; a < state_rows.size(); ++a)
          if (ex[a].first > 0.0)
            axpy(grad, ex[a].first / val, state_rows[a][ex[a].second]);
      return val;
    };
    const SimplexMinResult r = simplex_minimize(J, f, fg, opt);

    CalType t;
    t.mu_sq = dot(mu.data, mu.data);
    t.mu = std::move(mu);
    t.action = r.x;
    t.deficit = r.value;
    out.deficit = std::max(out.deficit, r.value);
    types->push_back(std::move(t));
  }
  out.types = std::move(types);
  return out;
}

// ---------------------------------------------------------------------------
// End-to-end play: informed stationary profile vs the uninformed calibrated
// strategy built from the auxiliary-game witnesses.
// ---------------------------------------------------------------------------

struct IIRunResult {
  std::size_t state_drawn = 0;
  Vec per_state_avg;      // counterfactual average rho^k(i^k_m, j_m)
  double weighted = 0.0;  // sum_k p^k per_state_avg^k
};

inline IIRunResult ii_run(const IIGame& g,
                          const std::vector<MixedAction>& profile,
                          std::shared_ptr<const std::vector<CalType>> types,
                          std::size_t horizon, std::uint64_t seed) {
  require(profile.size() == g.num_states(), "ii_run: profile size");
  for (const MixedAction& x : profile)
    validate_mixed_action(x, g.num_rows(), "ii_run: profile entry");
  require(horizon >= 1, "ii_run: horizon");

  const std::size_t K = g.num_states();
  CalibratedCore core(g.num_cols(), std::move(types), derive_seed(seed, 1));
  Rng env(derive_seed(seed, 0));

  IIRunResult out;
  out.state_drawn = static_cast<std::size_t>(env.sample(g.prior()));
  std::vector<KahanSum> sums(K);
  std::vector<std::size_t> draws(K, 0);
  for (std::size_t n = 0; n < horizon; ++n) {
    const MixedAction& y = core.next_mixed();
    const auto j = static_cast<std::size_t>(env.sample(y));
    for (std::size_t k = 0; k < K; ++k) {
      draws[k] = static_cast<std::size_t>(env.sample(profile[k]));
      sums[k].add(g.payoff(k, draws[k], j));
    }
    const auto s = static_cast<std::size_t>(
        sample_signal(g.transposed(out.state_drawn), j, draws[out.state_drawn],
                      env));
    core.observe_signal(j, s);
  }
  out.per_state_avg.assign(K, 0.0);
  for (std::size_t k = 0; k < K; ++k)
    out.per_state_avg[k] = sums[k].sum / static_cast<double>(horizon);
  for (std::size_t k = 0; k < K; ++k)
    out.weighted += g.prior()[k] * out.per_state_avg[k];
  return out;
}

}  // namespace approach
