#pragma once

// Thin wrappers around Eigen's dense kernels for the small (n <= ~15)
// systems that vertex enumeration and the projection QP solve. Everything
// public in the library speaks std::vector<double>; Eigen types stay here.

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "approach/common.hpp"

namespace approach {

// Row-major dense matrix as a flat vector, the shape used by polytopes.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec data;  // rows*cols entries, row-major

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  void append_row(const Vec& row) {
    require(row.size() == cols || rows == 0, "append_row: width mismatch");
    if (rows == 0 && cols == 0) cols = row.size();
    require(row.size() == cols, "append_row: width mismatch");
    data.insert(data.end(), row.begin(), row.end());
    ++rows;
  }

  Vec row(std::size_t r) const {
    return Vec(data.begin() + static_cast<std::ptrdiff_t>(r * cols),
               data.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols));
  }

  // y = A x
  Vec apply(const Vec& x) const {
    require(x.size() == cols, "apply: dimension mismatch");
    Vec y(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      double acc = 0.0;
      const double* a = data.data() + r * cols;
      for (std::size_t c = 0; c < cols; ++c) acc += a[c] * x[c];
      y[r] = acc;
    }
    return y;
  }
};

namespace detail {

inline Eigen::MatrixXd to_eigen(const DenseMatrix& m) {
  Eigen::MatrixXd e(m.rows, m.cols);
  for (std::size_t r = 0; r < m.rows; ++r)
    for (std::size_t c = 0; c < m.cols; ++c) e(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = m.at(r, c);
  return e;
}

inline Eigen::VectorXd to_eigen(const Vec& v) {
  Eigen::VectorXd e(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) e(static_cast<Eigen::Index>(i)) = v[i];
  return e;
}

inline Vec from_eigen(const Eigen::VectorXd& v) {
  Vec r(static_cast<std::size_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) r[static_cast<std::size_t>(i)] = v(i);
  return r;
}

}  // namespace detail

// Solves the (possibly rectangular, stacked) system A x = b in the least
// squares sense and reports whether it is consistent and uniquely
// determined: rank must be full column rank and the residual small.
// Returns nullopt when A is rank-deficient or the system is inconsistent
// beyond `residual_tol`.
inline std::optional<Vec> solve_exact(const DenseMatrix& A, const Vec& b,
                                      double residual_tol = 1e-7) {
  require(A.rows == b.size(), "solve_exact: rhs size mismatch");
  if (A.cols == 0) return Vec{};
  Eigen::MatrixXd ea = detail::to_eigen(A);
  Eigen::VectorXd eb = detail::to_eigen(b);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(ea);
  cod.setThreshold(1e-10);
  if (cod.rank() < static_cast<Eigen::Index>(A.cols)) return std::nullopt;
  Eigen::VectorXd x = cod.solve(eb);
  double scale = std::max(1.0, eb.lpNorm<Eigen::Infinity>());
  if ((ea * x - eb).lpNorm<Eigen::Infinity>() > residual_tol * scale)
    return std::nullopt;
  return detail::from_eigen(x);
}

// Numerical rank of a matrix (relative threshold).
inline std::size_t matrix_rank(const DenseMatrix& A) {
  if (A.rows == 0 || A.cols == 0) return 0;
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(
      detail::to_eigen(A));
  cod.setThreshold(1e-10);
  return static_cast<std::size_t>(cod.rank());
}

// Stationary distribution of the continuous-time Markov chain whose
// transition rate from r to k (r != k) is max(0, rates(r, k)), blended with
// a uniform mixing rate `mixing` (relative to the largest row sum) that
// makes the chain irreducible, so the stationary law is unique. Solves the
// global-balance equations directly: one balance row is redundant (the rows
// of the transposed generator sum to zero) and is replaced by the
// normalization sum(pi) = 1. Entries are clipped at zero against roundoff.
inline Vec stationary_distribution(const DenseMatrix& rates, double mixing) {
  require(rates.rows == rates.cols && rates.rows > 0,
          "stationary_distribution: matrix must be square and nonempty");
  require(mixing > 0.0, "stationary_distribution: mixing must be positive");
  const std::size_t n = rates.rows;
  if (n == 1) return Vec{1.0};
  double scale = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double row = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      if (k != r) row += std::max(0.0, rates.at(r, k));
    scale = std::max(scale, row);
  }
  if (scale <= 0.0) return Vec(n, 1.0 / static_cast<double>(n));

  const auto en = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(en, en);
  for (std::size_t r = 0; r < n; ++r) {
    double outflow = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == r) continue;
      const double q = std::max(0.0, rates.at(r, k)) / scale + mixing;
      M(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(r)) = q;
      outflow += q;
    }
    M(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r)) = -outflow;
  }
  M.row(en - 1).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(en);
  rhs(en - 1) = 1.0;
  Eigen::VectorXd pi = M.partialPivLu().solve(rhs);

  Vec out(n);
  double total = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double v = pi(static_cast<Eigen::Index>(r));
    out[r] = std::isfinite(v) ? std::max(0.0, v) : 0.0;
    total += out[r];
  }
  if (total <= 0.0) return Vec(n, 1.0 / static_cast<double>(n));
  for (double& v : out) v /= total;
  return out;
}

// Solves the symmetric KKT system of an equality-constrained least squares
// step; falls back to a Tikhonov-regularized solve when the system is
// singular (degenerate active sets).
inline Vec solve_kkt(const DenseMatrix& K, const Vec& rhs) {
  require(K.rows == K.cols && K.rows == rhs.size(), "solve_kkt: shape");
  Eigen::MatrixXd ek = detail::to_eigen(K);
  Eigen::VectorXd er = detail::to_eigen(rhs);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(ek);
  lu.setThreshold(1e-12);
  if (lu.isInvertible()) return detail::from_eigen(lu.solve(er));
  Eigen::MatrixXd reg =
      ek + tol::tikhonov * Eigen::MatrixXd::Identity(ek.rows(), ek.cols());
  return detail::from_eigen(reg.fullPivLu().solve(er));
}

}  // namespace approach
