#pragma once

// Core model: a two-player repeated game with vector payoffs for player 1
// and a stochastic signalling structure. Player 1 picks a row i, player 2 a
// column j; player 1's payoff is the vector rho(i,j) and the signal shown to
// player 1 is drawn from signal_row(i,j) in Delta(S).
//
// A "flag" is the only thing player 1 can ever learn about a mixed column y:
// the per-row signal laws (s(i,y))_i, stored as an I x S stochastic matrix.

#include <vector>

#include "approach/common.hpp"
#include "approach/linalg.hpp"
#include "approach/polytope.hpp"
#include "approach/qp.hpp"
#include "approach/rng.hpp"

namespace approach {

using MixedAction = Vec;

inline void validate_mixed_action(const MixedAction& x, std::size_t n,
                                  const std::string& what) {
  require(x.size() == n, what + ": wrong length");
  require_probability(x, what);
}

// I x S row-stochastic matrix; row i is the signal law player 1 sees when
// playing i. Flags live in R^{I*S} for all geometric purposes.
using Flag = DenseMatrix;

inline double flag_distance(const Flag& a, const Flag& b) {
  require(a.rows == b.rows && a.cols == b.cols, "flag_distance: shape");
  return norm2(sub(a.data, b.data));
}

class GameSpec {
 public:
  // payoffs[i][j] is a d-vector, signals[i][j] a probability vector over S.
  GameSpec(std::vector<std::vector<Vec>> payoffs,
           std::vector<std::vector<Vec>> signals) {
    require(!payoffs.empty() && !payoffs[0].empty(), "game: empty payoffs");
    rows_ = payoffs.size();
    cols_ = payoffs[0].size();
    dim_ = payoffs[0][0].size();
    require(dim_ > 0, "game: zero payoff dimension");
    require(signals.size() == rows_, "game: signal table row mismatch");
    num_signals_ = signals[0].empty() ? 0 : signals[0][0].size();
    require(num_signals_ > 0, "game: empty signal alphabet");

    payoffs_.resize(rows_ * cols_ * dim_);
    signals_.resize(rows_ * cols_ * num_signals_);
    payoff_bound_sq_ = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      require(payoffs[i].size() == cols_ && signals[i].size() == cols_,
              "game: ragged tables");
      for (std::size_t j = 0; j < cols_; ++j) {
        const Vec& p = payoffs[i][j];
        require(p.size() == dim_, "game: ragged payoff vectors");
        require(all_finite(p), "game: non-finite payoff");
        double nsq = std::inner_product(p.begin(), p.end(), p.begin(), 0.0);
        payoff_bound_sq_ = std::max(payoff_bound_sq_, nsq);
        std::copy(p.begin(), p.end(), payoffs_.begin() + static_cast<std::ptrdiff_t>((i * cols_ + j) * dim_));
        const Vec& s = signals[i][j];
        require(s.size() == num_signals_, "game: ragged signal rows");
        require_probability(s, "game: signal row");
        std::copy(s.begin(), s.end(), signals_.begin() + static_cast<std::ptrdiff_t>((i * cols_ + j) * num_signals_));
      }
    }
  }

  std::size_t num_rows() const { return rows_; }
  std::size_t num_cols() const { return cols_; }
  std::size_t num_signals() const { return num_signals_; }
  std::size_t payoff_dim() const { return dim_; }
  // B = max_{i,j} ||rho(i,j)||^2, the constant in the convergence bounds.
  double payoff_bound_sq() const { return payoff_bound_sq_; }

  const double* payoff(std::size_t i, std::size_t j) const {
    return payoffs_.data() + (i * cols_ + j) * dim_;
  }
  Vec payoff_vec(std::size_t i, std::size_t j) const {
    const double* p = payoff(i, j);
    return Vec(p, p + dim_);
  }
  const double* signal_row(std::size_t i, std::size_t j) const {
    return signals_.data() + (i * cols_ + j) * num_signals_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0, num_signals_ = 0, dim_ = 0;
  Vec payoffs_;
  Vec signals_;
  double payoff_bound_sq_ = 0.0;
};

// rho(x, y) = sum_{i,j} x_i y_j rho(i,j)
inline Vec expected_payoff(const GameSpec& g, const MixedAction& x,
                           const MixedAction& y) {
  validate_mixed_action(x, g.num_rows(), "expected_payoff: x");
  validate_mixed_action(y, g.num_cols(), "expected_payoff: y");
  Vec out(g.payoff_dim(), 0.0);
  for (std::size_t i = 0; i < g.num_rows(); ++i) {
    if (x[i] == 0.0) continue;
    for (std::size_t j = 0; j < g.num_cols(); ++j) {
      const double w = x[i] * y[j];
      if (w == 0.0) continue;
      const double* p = g.payoff(i, j);
      for (std::size_t k = 0; k < g.payoff_dim(); ++k) out[k] += w * p[k];
    }
  }
  return out;
}

// The flag of a mixed column: row i is the signal law of row i against y.
inline Flag flag_of(const GameSpec& g, const MixedAction& y) {
  require(y.size() == g.num_cols(), "flag_of: y wrong length");
  Flag f(g.num_rows(), g.num_signals());
  for (std::size_t i = 0; i < g.num_rows(); ++i)
    for (std::size_t j = 0; j < g.num_cols(); ++j) {
      if (y[j] == 0.0) continue;
      const double* s = g.signal_row(i, j);
      for (std::size_t k = 0; k < g.num_signals(); ++k)
        f.at(i, k) += y[j] * s[k];
    }
  return f;
}

// Vertices spanning the flag range: the flags of the pure columns,
// deduplicated at tol::flag_dedup, in lexicographic order.
inline std::vector<Flag> flag_range(const GameSpec& g) {
  std::vector<Flag> verts;
  for (std::size_t j = 0; j < g.num_cols(); ++j) {
    MixedAction ej(g.num_cols(), 0.0);
    ej[j] = 1.0;
    Flag f = flag_of(g, ej);
    bool dup = false;
    for (const Flag& v : verts)
      if (norm_inf(sub(v.data, f.data)) <= tol::flag_dedup) {
        dup = true;
        break;
      }
    if (!dup) verts.push_back(std::move(f));
  }
  std::sort(verts.begin(), verts.end(), [](const Flag& a, const Flag& b) {
    for (std::size_t i = 0; i < a.data.size(); ++i) {
      if (a.data[i] < b.data[i]) return true;
      if (a.data[i] > b.data[i]) return false;
    }
    return false;
  });
  return verts;
}

// H-representation of { y in Delta(J) : flag_of(y) = mu }. The polytope is
// empty whenever mu is outside the flag range; callers detect that through
// vertex enumeration or feasibility.
inline HPolytope inverse_flag_polytope(const GameSpec& g, const Flag& mu) {
  require(mu.rows == g.num_rows() && mu.cols == g.num_signals(),
          "inverse_flag_polytope: mu wrong shape");
  const std::size_t J = g.num_cols();
  HPolytope P = HPolytope::empty_like(J);
  P.known_bounded = true;
  Vec ones(J, 1.0);
  P.add_equality(ones, 1.0);
  for (std::size_t i = 0; i < g.num_rows(); ++i)
    for (std::size_t k = 0; k < g.num_signals(); ++k) {
      Vec row(J, 0.0);
      for (std::size_t j = 0; j < J; ++j) row[j] = g.signal_row(i, j)[k];
      P.add_equality(row, mu.at(i, k));
    }
  for (std::size_t j = 0; j < J; ++j) {
    Vec row(J, 0.0);
    row[j] = -1.0;
    P.add_inequality(row, 0.0);
  }
  return P;
}

// Euclidean projection of an arbitrary I x S matrix onto the flag range.
inline Flag project_flag_to_range(const GameSpec& g, const Flag& mu) {
  require(mu.rows == g.num_rows() && mu.cols == g.num_signals(),
          "project_flag_to_range: mu wrong shape");
  std::vector<Flag> verts = flag_range(g);
  std::vector<Vec> pts;
  pts.reserve(verts.size());
  for (const Flag& v : verts) pts.push_back(v.data);
  HullProjection proj = project_onto_hull(pts, mu.data);
  Flag out(g.num_rows(), g.num_signals());
  out.data = std::move(proj.point);
  return out;
}

inline int sample_signal(const GameSpec& g, std::size_t i, std::size_t j,
                         Rng& rng) {
  require(i < g.num_rows() && j < g.num_cols(), "sample_signal: bad indices");
  const double* s = g.signal_row(i, j);
  double u = rng.next_double();
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < g.num_signals(); ++k) {
    acc += s[k];
    if (u < acc) return static_cast<int>(k);
  }
  return static_cast<int>(g.num_signals()) - 1;
}

}  // namespace approach
