#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "golazo/error.hpp"

namespace golazo {

// Dense symmetric matrices are plain Eigen matrices; every routine that
// produces one writes both triangles.
template <typename Scalar>
using SymMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using SymMatrixd = SymMatrix<double>;
using Vectord = Vector<double>;
using Index = Eigen::Index;

enum class DefinitenessStatus { PositiveDefinite, PositiveSemiDefinite, Indefinite };

template <typename Scalar>
struct Definiteness {
  DefinitenessStatus status;
  Scalar smallestEigenvalueEstimate;
};

template <typename Scalar>
struct CholeskyLogDet {
  SymMatrix<Scalar> factor;  // lower triangular
  Scalar logDet;
};

template <typename Derived>
SymMatrix<typename Derived::Scalar> symmetrize(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  return (a + a.transpose()) * Scalar(0.5);
}

template <typename Derived>
bool is_symmetric(const Eigen::MatrixBase<Derived>& a, typename Derived::Scalar tol = 0) {
  if (a.rows() != a.cols()) return false;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = j + 1; i < a.rows(); ++i)
      if (std::abs(a(i, j) - a(j, i)) > tol) return false;
  return true;
}

/// Pivots below 1e-12 times the largest diagonal entry count as failure.
template <typename Derived>
typename Derived::Scalar pivot_tolerance(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  Scalar maxDiag = a.rows() > 0 ? a.diagonal().maxCoeff() : Scalar(0);
  return Scalar(1e-12) * std::max(maxDiag, Scalar(0));
}

namespace detail {

// Returns the failing pivot index, or -1 on success.
template <typename Scalar, typename Derived>
Index cholesky_in_place(const Eigen::MatrixBase<Derived>& a, SymMatrix<Scalar>& l) {
  const Index d = a.rows();
  const Scalar tol = pivot_tolerance(a);
  l.setZero(d, d);
  for (Index j = 0; j < d; ++j) {
    Scalar pivot = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > tol)) return j;
    const Scalar ljj = std::sqrt(pivot);
    l(j, j) = ljj;
    for (Index i = j + 1; i < d; ++i)
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / ljj;
  }
  return -1;
}

}  // namespace detail

/// Cholesky factorization with log-determinant. Throws NotPositiveDefinite
/// carrying the (0-based) pivot index where factorization broke down.
template <typename Derived>
CholeskyLogDet<typename Derived::Scalar> cholesky_logdet(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  if (a.rows() != a.cols() || a.rows() < 1)
    throw Error(ErrorCode::DimensionMismatch, "cholesky_logdet needs a non-empty square matrix");
  CholeskyLogDet<Scalar> out;
  const Index bad = detail::cholesky_in_place<Scalar>(a, out.factor);
  if (bad >= 0)
    throw Error(ErrorCode::NotPositiveDefinite, "pivot " + std::to_string(bad) + " not positive");
  out.logDet = Scalar(2) * out.factor.diagonal().array().log().sum();
  return out;
}

template <typename Derived>
bool is_positive_definite(const Eigen::MatrixBase<Derived>& a) {
  if (a.rows() != a.cols() || a.rows() < 1) return false;
  SymMatrix<typename Derived::Scalar> l;
  return detail::cholesky_in_place<typename Derived::Scalar>(a, l) < 0;
}

template <typename Derived>
typename Derived::Scalar log_det(const Eigen::MatrixBase<Derived>& a) {
  return cholesky_logdet(a).logDet;
}

template <typename Derived>
SymMatrix<typename Derived::Scalar> invert_pd(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const auto chol = cholesky_logdet(a);
  const Index d = a.rows();
  SymMatrix<Scalar> inv = SymMatrix<Scalar>::Identity(d, d);
  chol.factor.template triangularView<Eigen::Lower>().solveInPlace(inv);
  chol.factor.transpose().template triangularView<Eigen::Upper>().solveInPlace(inv);
  return symmetrize(inv);
}

/// Removes row and column j (0-based), preserving the order of the rest.
template <typename Derived>
SymMatrix<typename Derived::Scalar> principal_submatrix_drop(const Eigen::MatrixBase<Derived>& a,
                                                             Index j) {
  const Index d = a.rows();
  if (d < 2) throw Error(ErrorCode::DimensionTooSmall, "cannot drop from a 1x1 matrix");
  if (j < 0 || j >= d) throw Error(ErrorCode::DimensionMismatch, "index out of range");
  SymMatrix<typename Derived::Scalar> out(d - 1, d - 1);
  for (Index c = 0, oc = 0; c < d; ++c) {
    if (c == j) continue;
    for (Index r = 0, orow = 0; r < d; ++r) {
      if (r == j) continue;
      out(orow++, oc) = a(r, c);
    }
    ++oc;
  }
  return out;
}

/// Row j of a with the diagonal entry removed.
template <typename Derived>
Vector<typename Derived::Scalar> row_without_diagonal(const Eigen::MatrixBase<Derived>& a, Index j) {
  const Index d = a.rows();
  Vector<typename Derived::Scalar> out(d - 1);
  for (Index i = 0, k = 0; i < d; ++i)
    if (i != j) out(k++) = a(j, i);
  return out;
}

template <typename Derived>
Definiteness<typename Derived::Scalar> definiteness(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  Eigen::SelfAdjointEigenSolver<SymMatrix<Scalar>> eig(a, Eigen::EigenvaluesOnly);
  const Scalar lmin = eig.eigenvalues()(0);
  if (is_positive_definite(a)) return {DefinitenessStatus::PositiveDefinite, lmin};
  const Scalar scale = std::max(Scalar(1), a.diagonal().cwiseAbs().maxCoeff());
  const Scalar slack = Scalar(1e-10) * scale * Scalar(a.rows());
  if (lmin >= -slack) return {DefinitenessStatus::PositiveSemiDefinite, lmin};
  return {DefinitenessStatus::Indefinite, lmin};
}

/// Positive definite with all off-diagonal entries at most tol.
template <typename Derived>
bool is_m_matrix(const Eigen::MatrixBase<Derived>& k, typename Derived::Scalar tol) {
  if (!is_positive_definite(k)) return false;
  for (Index j = 0; j < k.cols(); ++j)
    for (Index i = 0; i < k.rows(); ++i)
      if (i != j && k(i, j) > tol) return false;
  return true;
}

}  // namespace golazo
