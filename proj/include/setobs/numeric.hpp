#pragma once

// Small dense-matrix kernel. Sizes in this library stay around n, l, p <= 10,
// so everything is plain dynamic Eigen storage in double precision.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "setobs/errors.hpp"

namespace setobs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline constexpr double kRankRelTol = 1e-12;

struct SvdResult {
  Matrix U;                // rows x rows, orthonormal
  Vector singular_values;  // min(rows, cols), non-increasing
  Matrix V;                // cols x cols, orthonormal
};

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

/// Cutoff below which a singular value is treated as zero. The scale is
/// floored at 1 so round-off residue (e.g. 1e-17 entries left over from an
/// orthogonal projection) is not mistaken for a rank-one matrix.
inline double rank_tolerance(Index rows, Index cols, double sigma_max) {
  return static_cast<double>(std::max<Index>({rows, cols, 1})) *
         std::max(sigma_max, 1.0) * kRankRelTol;
}

namespace detail {

// Flip column j of `a` (and of `b`, when paired) so its largest-magnitude
// entry is positive. Ties resolve to the lowest row index.
inline void normalize_column_sign(Matrix& a, Index j, Matrix* b) {
  if (a.rows() == 0) return;
  Index arg = 0;
  double best = -1.0;
  for (Index i = 0; i < a.rows(); ++i) {
    if (std::abs(a(i, j)) > best) {
      best = std::abs(a(i, j));
      arg = i;
    }
  }
  if (a(arg, j) < 0.0) {
    a.col(j) *= -1.0;
    if (b != nullptr) b->col(j) *= -1.0;
  }
}

}  // namespace detail

/// Full singular value decomposition m = U diag(s) V^T with deterministic
/// column signs (largest-magnitude entry of every U column is positive).
inline SvdResult svd(const Matrix& m) {
  if (!all_finite(m)) throw NumericalFailure("svd: non-finite input");
  const Index r = m.rows();
  const Index c = m.cols();
  SvdResult out;
  if (r == 0 || c == 0) {
    out.U = Matrix::Identity(r, r);
    out.V = Matrix::Identity(c, c);
    out.singular_values = Vector(0);
    return out;
  }
  Eigen::JacobiSVD<Matrix> solver(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (solver.info() != Eigen::Success) {
    throw NumericalFailure("svd: Jacobi sweep did not converge");
  }
  out.U = solver.matrixU();
  out.V = solver.matrixV();
  out.singular_values = solver.singularValues();
  const Index k = std::min(r, c);
  for (Index j = 0; j < k; ++j) detail::normalize_column_sign(out.U, j, &out.V);
  for (Index j = k; j < r; ++j) detail::normalize_column_sign(out.U, j, nullptr);
  for (Index j = k; j < c; ++j) detail::normalize_column_sign(out.V, j, nullptr);
  return out;
}

inline double default_tolerance(const Matrix& m, const Vector& s) {
  return rank_tolerance(m.rows(), m.cols(), s.size() > 0 ? s(0) : 0.0);
}

/// Numerical rank under rank_tolerance.
inline Index rank(const Matrix& m) {
  if (m.size() == 0) return 0;
  const SvdResult d = svd(m);
  const double tol = default_tolerance(m, d.singular_values);
  Index count = 0;
  for (Index i = 0; i < d.singular_values.size(); ++i) {
    if (d.singular_values(i) > tol) ++count;
  }
  return count;
}

/// Moore-Penrose pseudoinverse; singular values <= tol are dropped.
inline Matrix pinv(const Matrix& m, double tol) {
  if (tol < 0.0) throw ConfigError("pinv: negative tolerance");
  Matrix out = Matrix::Zero(m.cols(), m.rows());
  if (m.size() == 0) return out;
  const SvdResult d = svd(m);
  for (Index i = 0; i < d.singular_values.size(); ++i) {
    const double s = d.singular_values(i);
    if (s > tol) out += d.V.col(i) * (d.U.col(i).transpose() / s);
  }
  return out;
}

inline Matrix pinv(const Matrix& m) {
  if (m.size() == 0) return Matrix::Zero(m.cols(), m.rows());
  const SvdResult d = svd(m);
  return pinv(m, default_tolerance(m, d.singular_values));
}

/// Induced 2-norm. Empty matrices have norm 0.
inline double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (!all_finite(m)) {
    // Overflowed radius coefficients are legitimate in uncertified runs.
    if (m.array().isNaN().any()) throw NumericalFailure("spectral_norm: NaN entry");
    return std::numeric_limits<double>::infinity();
  }
  Eigen::JacobiSVD<Matrix> solver(m);
  return solver.singularValues()(0);
}

/// Smallest singular value above the rank tolerance.
inline double sigma_min(const Matrix& m) {
  if (m.size() == 0) throw UndefinedSigmaMin("sigma_min: empty matrix");
  const SvdResult d = svd(m);
  const double tol = default_tolerance(m, d.singular_values);
  for (Index i = d.singular_values.size() - 1; i >= 0; --i) {
    if (d.singular_values(i) > tol) return d.singular_values(i);
  }
  throw UndefinedSigmaMin("sigma_min: all singular values below tolerance");
}

/// Product of two nonnegative bounds where 0 * inf counts as 0 (a zero
/// coefficient annihilates an unbounded radius).
inline double bound_product(double a, double b) {
  if (a == 0.0 || b == 0.0) return 0.0;
  return a * b;
}

}  // namespace setobs
