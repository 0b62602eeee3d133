#pragma once

#include <cmath>
#include <limits>
#include <string>

#include "golazo/graph.hpp"
#include "golazo/matrix_core.hpp"

namespace golazo {

/// Sign-dependent penalty weights. Off the diagonal L <= 0 <= U, entries may
/// be infinite; the diagonal is zero (never penalized).
template <typename Scalar>
struct PenaltyBounds {
  SymMatrix<Scalar> L;
  SymMatrix<Scalar> U;

  Index dim() const { return L.rows(); }
};

using PenaltyBoundsd = PenaltyBounds<double>;

template <typename Scalar>
constexpr Scalar infinity() {
  return std::numeric_limits<Scalar>::infinity();
}

/// Extended-real product with the convention (+-inf) * 0 = 0.
template <typename Scalar>
constexpr Scalar ext_mul(Scalar bound, Scalar x) {
  return x == Scalar(0) ? Scalar(0) : bound * x;
}

template <typename Scalar>
void validate_bounds(const PenaltyBounds<Scalar>& b) {
  const Index d = b.L.rows();
  if (d < 1 || b.L.cols() != d || b.U.rows() != d || b.U.cols() != d)
    throw Error(ErrorCode::InvalidBounds, "L and U must be square of equal size");
  for (Index j = 0; j < d; ++j) {
    if (b.L(j, j) != 0 || b.U(j, j) != 0)
      throw Error(ErrorCode::InvalidBounds, "diagonal of L and U must be zero");
    for (Index i = 0; i < d; ++i) {
      if (i == j) continue;
      const Scalar l = b.L(i, j), u = b.U(i, j);
      if (std::isnan(l) || std::isnan(u))
        throw Error(ErrorCode::InvalidBounds, "NaN bound");
      if (!(l <= 0) || !(u >= 0))
        throw Error(ErrorCode::InvalidBounds, "need L_ij <= 0 <= U_ij off the diagonal");
      if (l != b.L(j, i) || u != b.U(j, i))
        throw Error(ErrorCode::InvalidBounds, "L and U must be symmetric");
    }
  }
}

/// Sum over ordered pairs i != j of max(L_ij K_ij, U_ij K_ij); each
/// unordered pair therefore contributes twice.
template <typename Derived, typename Scalar = typename Derived::Scalar>
Scalar golazo_norm(const Eigen::MatrixBase<Derived>& k, const PenaltyBounds<Scalar>& b) {
  validate_bounds(b);
  if (k.rows() != b.dim() || k.cols() != b.dim())
    throw Error(ErrorCode::DimensionMismatch, "K and bounds differ in size");
  Scalar total = 0;
  for (Index j = 0; j < k.cols(); ++j)
    for (Index i = 0; i < k.rows(); ++i) {
      if (i == j) continue;
      total += std::max(ext_mul(b.L(i, j), k(i, j)), ext_mul(b.U(i, j), k(i, j)));
    }
  return total;
}

/// Tightens infinite or loose bounds to the range any positive definite
/// feasible Sigma can reach: |Sigma_ij| < sqrt(S_ii S_jj).
template <typename Derived, typename Scalar = typename Derived::Scalar>
PenaltyBounds<Scalar> clip_to_finite(const PenaltyBounds<Scalar>& b,
                                     const Eigen::MatrixBase<Derived>& s) {
  validate_bounds(b);
  const Index d = b.dim();
  if (s.rows() != d || s.cols() != d)
    throw Error(ErrorCode::DimensionMismatch, "S and bounds differ in size");
  for (Index i = 0; i < d; ++i)
    if (!(s(i, i) > 0))
      throw Error(ErrorCode::NonpositiveDiagonal, "S(" + std::to_string(i) + "," +
                                                      std::to_string(i) + ") <= 0");
  PenaltyBounds<Scalar> out = b;
  for (Index j = 0; j < d; ++j)
    for (Index i = j + 1; i < d; ++i) {
      const Scalar r = std::sqrt(s(i, i) * s(j, j));
      const Scalar sij = (s(i, j) + s(j, i)) / 2;
      out.U(i, j) = out.U(j, i) = std::min(b.U(i, j), r - sij);
      out.L(i, j) = out.L(j, i) = std::max(b.L(i, j), -sij - r);
    }
  return out;
}

template <typename Scalar>
PenaltyBounds<Scalar> scale_bounds(const PenaltyBounds<Scalar>& b, Scalar factor) {
  if (!(factor > 0)) throw Error(ErrorCode::NegativePenalty, "scale factor must be positive");
  PenaltyBounds<Scalar> out = b;
  out.L *= factor;
  out.U *= factor;
  return out;
}

enum class PresetKind { Glasso, Asymmetric, Positive, Mtp2, Ggm, DualPositivity };

/// Parameters for preset_bounds. rho is used by glasso and positive,
/// rhoNeg/rhoPos by asymmetric, graph by ggm and dual_positivity.
struct Preset {
  PresetKind kind = PresetKind::Positive;
  double rho = 0;
  double rhoNeg = 0;
  double rhoPos = 0;
  GraphSpec graph;

  static Preset glasso(double rho) { return {PresetKind::Glasso, rho, 0, 0, {}}; }
  static Preset asymmetric(double rhoNeg, double rhoPos) {
    return {PresetKind::Asymmetric, 0, rhoNeg, rhoPos, {}};
  }
  static Preset positive(double rho) { return {PresetKind::Positive, rho, 0, 0, {}}; }
  static Preset mtp2() { return {PresetKind::Mtp2, 0, 0, 0, {}}; }
  static Preset ggm(GraphSpec g) { return {PresetKind::Ggm, 0, 0, 0, std::move(g)}; }
  static Preset dual_positivity(GraphSpec g) {
    return {PresetKind::DualPositivity, 0, 0, 0, std::move(g)};
  }
};

template <typename Scalar = double>
PenaltyBounds<Scalar> preset_bounds(const Preset& p, Index d) {
  if (d < 1) throw Error(ErrorCode::DimensionTooSmall, "dimension must be positive");
  if (p.rho < 0 || p.rhoNeg < 0 || p.rhoPos < 0)
    throw Error(ErrorCode::NegativePenalty, "penalty parameters must be nonnegative");
  const Scalar inf = infinity<Scalar>();
  SymMatrix<Scalar> lo = SymMatrix<Scalar>::Zero(d, d);
  SymMatrix<Scalar> hi = SymMatrix<Scalar>::Zero(d, d);
  auto fill = [&](Scalar l, Scalar u) {
    lo.setConstant(l);
    hi.setConstant(u);
  };
  switch (p.kind) {
    case PresetKind::Glasso: fill(-Scalar(p.rho), Scalar(p.rho)); break;
    case PresetKind::Asymmetric: fill(-Scalar(p.rhoNeg), Scalar(p.rhoPos)); break;
    case PresetKind::Positive: fill(0, Scalar(p.rho)); break;
    case PresetKind::Mtp2: fill(0, inf); break;
    case PresetKind::Ggm:
    case PresetKind::DualPositivity: {
      if (p.graph.dim() != d) throw Error(ErrorCode::InvalidGraph, "graph size differs from d");
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j) {
          if (i == j) continue;
          const bool edge = p.graph.has_edge(i, j);
          if (p.kind == PresetKind::Ggm) {
            // non-edges are forced to zero in K, edges unpenalized
            lo(i, j) = edge ? Scalar(0) : -inf;
            hi(i, j) = edge ? Scalar(0) : inf;
          } else {
            lo(i, j) = edge ? -inf : Scalar(0);
            hi(i, j) = 0;
          }
        }
      break;
    }
  }
  lo.diagonal().setZero();
  hi.diagonal().setZero();
  return {lo, hi};
}

}  // namespace golazo
