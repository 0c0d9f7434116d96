#pragma once

// Dense two-phase tableau simplex with Bland's rule. Problems here are tiny
// (tens of rows), so a plain tableau beats anything fancier and Bland's rule
// makes the pivot sequence deterministic and cycle-free.
//
// Standard form solved:  maximize c'x  subject to  A x <= b,  x >= 0.
// Negative right-hand sides are allowed; phase 1 drives artificials out.

#include <cstddef>
#include <vector>

#include "approach/common.hpp"
#include "approach/linalg.hpp"

namespace approach {

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  double value = 0.0;
  Vec x;
};

class SimplexTableau {
 public:
  // A is m x n. Maximizes c'x s.t. Ax <= b, x >= 0.
  static LpResult solve(const DenseMatrix& A, const Vec& b, const Vec& c) {
    require(A.rows == b.size(), "lp: rhs size mismatch");
    require(A.cols == c.size(), "lp: objective size mismatch");
    SimplexTableau t(A, b, c);
    return t.run();
  }

 private:
  std::size_t m_, n_;          // constraints, structural variables
  std::size_t num_art_ = 0;    // artificial variables
  std::size_t cols_ = 0;       // total variable columns (no rhs)
  std::vector<Vec> rows_;      // m_ constraint rows, each cols_+1 wide
  Vec zrow_, wrow_;            // phase-2 / phase-1 objective rows
  std::vector<int> basis_;     // basic variable per row
  std::vector<bool> blocked_;  // artificial columns barred from entering

  SimplexTableau(const DenseMatrix& A, const Vec& b, const Vec& c)
      : m_(A.rows), n_(A.cols) {
    // Count artificials: one per negative rhs row.
    for (double bi : b)
      if (bi < 0) ++num_art_;
    cols_ = n_ + m_ + num_art_;
    rows_.assign(m_, Vec(cols_ + 1, 0.0));
    zrow_.assign(cols_ + 1, 0.0);
    wrow_.assign(cols_ + 1, 0.0);
    basis_.assign(m_, -1);
    blocked_.assign(cols_, false);

    std::size_t art = 0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double sign = b[i] < 0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) rows_[i][j] = sign * A.at(i, j);
      rows_[i][n_ + i] = sign;  // slack
      rows_[i][cols_] = sign * b[i];
      if (b[i] < 0) {
        std::size_t a_col = n_ + m_ + art;
        rows_[i][a_col] = 1.0;
        basis_[i] = static_cast<int>(a_col);
        blocked_[a_col] = true;
        ++art;
      } else {
        basis_[i] = static_cast<int>(n_ + i);
      }
    }
    for (std::size_t j = 0; j < n_; ++j) zrow_[j] = c[j];
    // Phase-1 objective w = -sum(artificials), expressed through the basis:
    // start from -1 on artificial columns, then add their rows.
    if (num_art_ > 0) {
      for (std::size_t j = n_ + m_; j < cols_; ++j) wrow_[j] = -1.0;
      for (std::size_t i = 0; i < m_; ++i)
        if (basis_[i] >= static_cast<int>(n_ + m_))
          for (std::size_t j = 0; j <= cols_; ++j) wrow_[j] += rows_[i][j];
    }
  }

  LpResult run() {
    if (num_art_ > 0) {
      if (!pivot_loop(/*phase1=*/true)) return {LpStatus::kUnbounded, 0.0, {}};
      // The phase-1 rhs cell accumulates -w = sum of artificials; any
      // residual mass certifies infeasibility.
      if (wrow_[cols_] > 1e-7) return {LpStatus::kInfeasible, 0.0, {}};
      // Kick leftover artificials out of the basis where possible; a row
      // with no eligible pivot is redundant and its artificial stays at 0.
      for (std::size_t i = 0; i < m_; ++i) {
        if (basis_[i] < static_cast<int>(n_ + m_)) continue;
        for (std::size_t j = 0; j < n_ + m_; ++j) {
          if (std::abs(rows_[i][j]) > tol::lp_pivot) {
            pivot(i, j);
            break;
          }
        }
      }
    }
    if (!pivot_loop(/*phase1=*/false)) return {LpStatus::kUnbounded, 0.0, {}};
    LpResult res;
    res.status = LpStatus::kOptimal;
    res.x.assign(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] >= 0 && basis_[i] < static_cast<int>(n_))
        res.x[static_cast<std::size_t>(basis_[i])] = rows_[i][cols_];
    // Pivots subtract (reduced cost) * (basic value) from the objective
    // cell, so it holds the negated optimum.
    res.value = -zrow_[cols_];
    return res;
  }

  // Bland: entering = smallest column index with positive reduced cost;
  // leaving = min ratio, ties to smallest basic index. Returns false on
  // unbounded.
  bool pivot_loop(bool phase1) {
    Vec& obj = phase1 ? wrow_ : zrow_;
    for (;;) {
      std::size_t enter = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (blocked_[j] && !phase1) continue;
        if (is_basic(j)) continue;
        if (obj[j] > tol::lp_pivot) {
          enter = j;
          break;
        }
      }
      if (enter == cols_) return true;  // optimal
      std::size_t leave = m_;
      double best_ratio = 0.0;
      for (std::size_t i = 0; i < m_; ++i) {
        if (rows_[i][enter] <= tol::lp_pivot) continue;
        double ratio = rows_[i][cols_] / rows_[i][enter];
        if (leave == m_ || ratio < best_ratio - 1e-15 ||
            (std::abs(ratio - best_ratio) <= 1e-15 &&
             basis_[i] < basis_[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
      if (leave == m_) return false;  // unbounded direction
      pivot(leave, enter);
    }
  }

  bool is_basic(std::size_t col) const {
    for (std::size_t i = 0; i < m_; ++i)
      if (basis_[i] == static_cast<int>(col)) return true;
    return false;
  }

  void pivot(std::size_t row, std::size_t col) {
    Vec& pr = rows_[row];
    const double inv = 1.0 / pr[col];
    for (double& v : pr) v *= inv;
    pr[col] = 1.0;  // exact
    auto eliminate = [&](Vec& target) {
      const double f = target[col];
      if (f == 0.0) return;
      for (std::size_t j = 0; j <= cols_; ++j) target[j] -= f * pr[j];
      target[col] = 0.0;
    };
    for (std::size_t i = 0; i < m_; ++i)
      if (i != row) eliminate(rows_[i]);
    eliminate(zrow_);
    eliminate(wrow_);
    basis_[row] = static_cast<int>(col);
  }
};

inline LpResult solve_lp(const DenseMatrix& A, const Vec& b, const Vec& c) {
  return SimplexTableau::solve(A, b, c);
}

}  // namespace approach
