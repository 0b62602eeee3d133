#pragma once

#include <cmath>
#include <iostream>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "golazo/boxqp.hpp"
#include "golazo/matrix_core.hpp"
#include "golazo/penalty.hpp"

namespace golazo {

struct SolverConfig {
  double dualGapTol = 1e-8;
  int maxSweeps = 1000;
  bool verbose = false;
  // Screen isolated rows and forced zeros before solving.
  bool screen = true;
  double qpTol = 1e-10;
  // |K_ij| above this counts as an edge.
  double edgeThreshold = 1e-6;
};

enum class StartKind { Provided, Sample, Interior, SingleLinkage };

inline const char* to_string(StartKind k) {
  switch (k) {
    case StartKind::Provided: return "provided";
    case StartKind::Sample: return "sample";
    case StartKind::Interior: return "interior";
    case StartKind::SingleLinkage: return "single-linkage";
  }
  return "?";
}

template <typename Scalar>
struct FitResult {
  SymMatrix<Scalar> Khat;
  SymMatrix<Scalar> SigmaHat;
  Scalar dualGap = 0;
  int sweeps = 0;
  std::vector<Scalar> gapTrace;  // gap at the start point, then after every sweep
  Eigen::MatrixXi signPattern;
  PenaltyBounds<Scalar> clippedBounds;
  StartKind start = StartKind::Sample;
  std::vector<Index> isolatedRows;
  std::vector<std::pair<Index, Index>> forcedZeros;
  bool ridgeUsed = false;
  bool converged = false;

  size_t edge_count() const {
    size_t n = 0;
    for (Index j = 0; j < signPattern.cols(); ++j)
      for (Index i = j + 1; i < signPattern.rows(); ++i) n += signPattern(i, j) != 0;
    return n;
  }
};

using FitResultd = FitResult<double>;

/// Thrown when the sweep budget runs out; carries the last iterate.
template <typename Scalar>
class MaxSweepsError : public Error {
 public:
  MaxSweepsError(FitResult<Scalar> best, const std::string& what)
      : Error(ErrorCode::MaxSweepsExceeded, what), best_(std::move(best)) {}
  const FitResult<Scalar>& best() const { return best_; }

 private:
  FitResult<Scalar> best_;
};

namespace detail {

template <typename Derived>
void require_positive_diagonal(const Eigen::MatrixBase<Derived>& s) {
  for (Index i = 0; i < s.rows(); ++i)
    if (!(s(i, i) > 0))
      throw Error(ErrorCode::NonpositiveDiagonal, "diagonal entry " + std::to_string(i) + " <= 0");
}

}  // namespace detail

/// tr(S K) - d + ||K||_LU. Bounds should already be finite (clipped).
template <typename DerivedS, typename DerivedK, typename Scalar = typename DerivedS::Scalar>
Scalar duality_gap(const Eigen::MatrixBase<DerivedS>& s, const Eigen::MatrixBase<DerivedK>& k,
                   const PenaltyBounds<Scalar>& clipped) {
  const Scalar trSK = s.cwiseProduct(k.transpose()).sum();
  return trSK - Scalar(s.rows()) + golazo_norm(k, clipped);
}

/// Largest violation over off-diagonal pairs of the subgradient condition
///   Sigma_ij - S_ij = L_ij if K_ij < 0, in [L_ij, U_ij] if K_ij = 0,
///   = U_ij if K_ij > 0,
/// where |K_ij| <= threshold counts as zero.
template <typename Scalar>
Scalar kkt_residual(const SymMatrix<Scalar>& s, const SymMatrix<Scalar>& sigma,
                    const SymMatrix<Scalar>& k, const PenaltyBounds<Scalar>& b,
                    Scalar threshold) {
  Scalar worst = 0;
  for (Index j = 0; j < s.cols(); ++j)
    for (Index i = 0; i < s.rows(); ++i) {
      if (i == j) continue;
      const Scalar delta = sigma(i, j) - s(i, j);
      Scalar r;
      if (k(i, j) > threshold)
        r = std::abs(delta - b.U(i, j));
      else if (k(i, j) < -threshold)
        r = std::abs(delta - b.L(i, j));
      else
        r = std::max({Scalar(0), b.L(i, j) - delta, delta - b.U(i, j)});
      if (std::isnan(r)) r = infinity<Scalar>();
      worst = std::max(worst, r);
    }
  return worst;
}

/// (1 - t) S + t diag(S) with the largest t in (0, 1] keeping
/// L_ij <= -t S_ij <= U_ij. Requires L_ij < 0 < U_ij off the diagonal.
template <typename Derived, typename Scalar = typename Derived::Scalar>
SymMatrix<Scalar> starting_point_interior(const Eigen::MatrixBase<Derived>& s,
                                          const PenaltyBounds<Scalar>& b) {
  validate_bounds(b);
  detail::require_positive_diagonal(s);
  const Index d = s.rows();
  Scalar t = 1;
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) {
      if (i == j) continue;
      if (!(b.L(i, j) < 0) || !(b.U(i, j) > 0))
        throw Error(ErrorCode::BoundsNotStrict, "pair (" + std::to_string(i) + "," +
                                                    std::to_string(j) + ") has a zero bound");
      if (s(i, j) > 0) t = std::min(t, -b.L(i, j) / s(i, j));
      if (s(i, j) < 0) t = std::min(t, b.U(i, j) / -s(i, j));
    }
  if (is_positive_definite(s)) return s;
  SymMatrix<Scalar> out = (Scalar(1) - t) * s;
  out.diagonal() = s.diagonal();
  return out;
}

/// Max-min path closure of the positive part of a unit-diagonal matrix:
/// Z_ij is the largest bottleneck R_uv over paths from i to j using only
/// positive entries, 0 if there is none. Computed by single-linkage
/// agglomeration (Prim on the maximum spanning forest) in O(d^2).
template <typename Derived, typename Scalar = typename Derived::Scalar>
SymMatrix<Scalar> single_linkage_matrix(const Eigen::MatrixBase<Derived>& r) {
  const Index d = r.rows();
  if (d < 1 || r.cols() != d) throw Error(ErrorCode::DimensionMismatch, "R must be square");
  for (Index i = 0; i < d; ++i)
    if (std::abs(r(i, i) - Scalar(1)) > Scalar(1e-12))
      throw Error(ErrorCode::NotUnitDiagonal, "R(" + std::to_string(i) + ") != 1");

  SymMatrix<Scalar> z = SymMatrix<Scalar>::Identity(d, d);
  std::vector<char> inTree(static_cast<size_t>(d), 0);
  std::vector<Scalar> bestLink(static_cast<size_t>(d), Scalar(0));
  std::vector<Index> parent(static_cast<size_t>(d), -1);
  std::vector<Index> added;
  added.reserve(static_cast<size_t>(d));

  for (Index step = 0; step < d; ++step) {
    Index v = -1;
    for (Index u = 0; u < d; ++u)
      if (!inTree[u] && (v < 0 || bestLink[u] > bestLink[v])) v = u;
    // bestLink[v] == 0 means v opens a new component: Z stays 0 across it.
    if (bestLink[v] > 0) {
      const Index p = parent[v];
      for (Index u : added) {
        const Scalar val = u == p ? bestLink[v] : std::min(bestLink[v], z(p, u));
        z(v, u) = z(u, v) = val;
      }
    }
    inTree[v] = 1;
    added.push_back(v);
    for (Index u = 0; u < d; ++u)
      if (!inTree[u] && r(u, v) > bestLink[u]) {
        bestLink[u] = r(u, v);
        parent[u] = v;
      }
  }
  return z;
}

/// (1 - t) S + t Z_S with Z_S the single-linkage matrix rescaled to diag(S)
/// and t = min(1, min_ij U_ij / max|Z_S - S|). Feasible whenever L <= 0.
template <typename Derived, typename Scalar = typename Derived::Scalar>
SymMatrix<Scalar> starting_point_single_linkage(const Eigen::MatrixBase<Derived>& s,
                                                const PenaltyBounds<Scalar>& b) {
  validate_bounds(b);
  detail::require_positive_diagonal(s);
  const Index d = s.rows();
  Scalar rho = infinity<Scalar>();
  for (Index j = 0; j < d; ++j)
    for (Index i = 0; i < d; ++i) {
      if (i == j) continue;
      if (!(s(i, j) < std::sqrt(s(i, i) * s(j, j))))
        throw Error(ErrorCode::DegenerateCorrelation,
                    "S(" + std::to_string(i) + "," + std::to_string(j) + ") reaches sqrt(S_ii S_jj)");
      if (!(b.U(i, j) > 0))
        throw Error(ErrorCode::InfeasibleBounds,
                    "U(" + std::to_string(i) + "," + std::to_string(j) + ") = 0");
      rho = std::min(rho, b.U(i, j));
    }
  if (is_positive_definite(s)) return s;

  const Vector<Scalar> sd = s.diagonal().cwiseSqrt();
  const SymMatrix<Scalar> r = sd.cwiseInverse().asDiagonal() * s * sd.cwiseInverse().asDiagonal();
  SymMatrix<Scalar> rUnit = symmetrize(r);
  rUnit.diagonal().setOnes();
  const SymMatrix<Scalar> z = sd.asDiagonal() * single_linkage_matrix(rUnit) * sd.asDiagonal();
  const Scalar gapNorm = (z - s).cwiseAbs().maxCoeff();
  const Scalar t = gapNorm > 0 ? std::min(Scalar(1), rho / gapNorm) : Scalar(1);
  SymMatrix<Scalar> out = (Scalar(1) - t) * s + t * z;
  out.diagonal() = s.diagonal();
  return symmetrize(out);
}

namespace detail {

template <typename Scalar>
bool in_box(const SymMatrix<Scalar>& sigma, const SymMatrix<Scalar>& s,
            const PenaltyBounds<Scalar>& c) {
  const Index d = s.rows();
  for (Index j = 0; j < d; ++j) {
    if (sigma(j, j) != s(j, j)) return false;
    for (Index i = 0; i < d; ++i) {
      if (i == j) continue;
      const Scalar v = sigma(i, j);
      if (v < s(i, j) + c.L(i, j) || v > s(i, j) + c.U(i, j)) return false;
    }
  }
  return true;
}

}  // namespace detail

/// Block-coordinate ascent on the dual
///
///   maximize log det Sigma + d   subject to  S + L <= Sigma <= S + U,
///
/// one row of Sigma per box QP, diagonal held at diag(S). Stops when the
/// duality gap tr(S K) - d + ||K||_LU drops to config.dualGapTol and the
/// sign conditions hold to 10 * dualGapTol at the edge threshold.
///
/// Starting point: `start` when given (must be dually feasible), else S if
/// positive definite, else the diagonal blend when every bound is strict,
/// else the single-linkage blend when U > 0 off the diagonal.
template <typename Derived, typename Scalar = typename Derived::Scalar>
FitResult<Scalar> fit(const Eigen::MatrixBase<Derived>& sIn, const PenaltyBounds<Scalar>& bounds,
                      const SolverConfig& config = {},
                      const SymMatrix<Scalar>* start = nullptr) {
  if (!(config.dualGapTol > 0) || config.maxSweeps < 1)
    throw Error(ErrorCode::InvalidConfig, "dualGapTol must be positive and maxSweeps >= 1");
  validate_bounds(bounds);
  const Index d = sIn.rows();
  if (sIn.cols() != d || bounds.dim() != d)
    throw Error(ErrorCode::DimensionMismatch, "S and bounds differ in size");
  const Scalar symTol = Scalar(1e-9) * std::max(Scalar(1), sIn.cwiseAbs().maxCoeff());
  if (!is_symmetric(sIn, symTol)) throw Error(ErrorCode::DimensionMismatch, "S must be symmetric");
  const SymMatrix<Scalar> s = symmetrize(sIn);

  FitResult<Scalar> res;
  res.clippedBounds = clip_to_finite(bounds, s);
  const auto& c = res.clippedBounds;

  std::vector<char> isolated(static_cast<size_t>(d), 0);
  if (config.screen) {
    for (Index j = 0; j < d; ++j) {
      bool iso = true;
      for (Index i = 0; i < d && iso; ++i)
        if (i != j) iso = s(i, j) + bounds.L(i, j) <= 0 && 0 <= s(i, j) + bounds.U(i, j);
      if (iso && d > 1) {
        isolated[j] = 1;
        res.isolatedRows.push_back(j);
      }
    }
    for (Index j = 0; j < d; ++j)
      for (Index i = j + 1; i < d; ++i) {
        const Scalar r = std::sqrt(s(i, i) * s(j, j));
        if (bounds.L(i, j) <= -s(i, j) - r && bounds.U(i, j) >= -s(i, j) + r)
          res.forcedZeros.emplace_back(i, j);
      }
  }

  SymMatrix<Scalar> sigma;
  if (start) {
    sigma = *start;
    if (sigma.rows() != d || !is_positive_definite(sigma) || !detail::in_box(sigma, s, c))
      throw Error(ErrorCode::NoFeasibleStart, "provided start is not dually feasible");
    res.start = StartKind::Provided;
  } else if (is_positive_definite(s)) {
    sigma = s;
    res.start = StartKind::Sample;
  } else {
    bool strict = true, upperPositive = true;
    for (Index j = 0; j < d; ++j)
      for (Index i = 0; i < d; ++i) {
        if (i == j) continue;
        strict = strict && bounds.L(i, j) < 0 && bounds.U(i, j) > 0;
        upperPositive = upperPositive && bounds.U(i, j) > 0;
      }
    try {
      if (strict) {
        sigma = starting_point_interior(s, bounds);
        res.start = StartKind::Interior;
      } else if (upperPositive) {
        sigma = starting_point_single_linkage(s, bounds);
        res.start = StartKind::SingleLinkage;
      } else {
        throw Error(ErrorCode::NoFeasibleStart,
                    "S is singular and some U_ij = 0: no starting point construction applies");
      }
    } catch (const Error& e) {
      if (e.code() == ErrorCode::NoFeasibleStart) throw;
      throw Error(ErrorCode::NoFeasibleStart, e.what());
    }
    if (!is_positive_definite(sigma))
      throw Error(ErrorCode::NoFeasibleStart, "constructed starting point is not positive definite");
  }
  for (Index j = 0; j < d; ++j)
    if (isolated[j]) {
      for (Index i = 0; i < d; ++i)
        if (i != j) sigma(i, j) = sigma(j, i) = 0;
    }

  auto finish = [&](const SymMatrix<Scalar>& k) {
    res.SigmaHat = sigma;
    res.Khat = k;
    res.signPattern.setZero(d, d);
    for (Index j = 0; j < d; ++j)
      for (Index i = 0; i < d; ++i) {
        const Scalar v = k(i, j);
        if (i == j || std::abs(v) > Scalar(config.edgeThreshold))
          res.signPattern(i, j) = v > 0 ? 1 : -1;
      }
  };

  SymMatrix<Scalar> k = invert_pd(sigma);
  res.dualGap = duality_gap(s, k, c);
  res.gapTrace.push_back(res.dualGap);

  // Done when the gap is small and every |K_ij| above the edge threshold
  // sits on its bound to within 10 * dualGapTol.
  const Scalar kktTol = Scalar(10 * config.dualGapTol);
  auto done = [&] {
    return res.dualGap <= Scalar(config.dualGapTol) &&
           kkt_residual(s, sigma, k, c, Scalar(config.edgeThreshold)) <= kktTol;
  };

  Vector<Scalar> lo(d - 1), hi(d - 1);
  while (!done()) {
    if (res.sweeps >= config.maxSweeps) {
      finish(k);
      throw MaxSweepsError<Scalar>(res, "duality gap " + std::to_string(double(res.dualGap)) +
                                            " after " + std::to_string(res.sweeps) + " sweeps");
    }
    for (Index j = 0; j < d; ++j) {
      if (isolated[j] || d < 2) continue;
      const SymMatrix<Scalar> w = invert_pd(principal_submatrix_drop(sigma, j));
      for (Index i = 0, t = 0; i < d; ++i) {
        if (i == j) continue;
        lo(t) = s(j, i) + c.L(j, i);
        hi(t) = s(j, i) + c.U(j, i);
        ++t;
      }
      // the previous solution for row j seeds the active set
      const Vector<Scalar> current = row_without_diagonal(sigma, j);
      const auto qp = solve_boxqp<Scalar>(w, lo, hi, Scalar(config.qpTol), &current);
      res.ridgeUsed = res.ridgeUsed || qp.ridged;
      for (Index i = 0, t = 0; i < d; ++i) {
        if (i == j) continue;
        sigma(j, i) = sigma(i, j) = qp.y(t++);
      }
    }
    ++res.sweeps;
    k = invert_pd(sigma);
    res.dualGap = duality_gap(s, k, c);
    res.gapTrace.push_back(res.dualGap);
    if (config.verbose)
      std::cerr << "sweep " << res.sweeps << " gap " << double(res.dualGap) << '\n';
  }
  res.converged = true;
  finish(k);
  return res;
}

}  // namespace golazo
