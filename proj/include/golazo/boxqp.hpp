#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "golazo/matrix_core.hpp"

namespace golazo {

template <typename Scalar>
struct BoxQpResult {
  Vector<Scalar> y;
  int iterations = 0;
  bool ridged = false;  // W was regularized to W + eps I
};

/// Primal active-set solver for
///
///   minimize  y' W y   subject to  lower <= y <= upper,
///
/// with W positive definite. Box ends may be infinite (such ends are never
/// activated). `warmStart`, when given, is projected onto the box and its
/// bound-touching coordinates seed the working set.
///
/// On return, with g = 2 W y: |g_i| <= tol at free coordinates, g_i >= -tol
/// at lower bounds and g_i <= tol at upper bounds, where tol is scaled by
/// max(1, max|W_ij| * max(1, max|y_i|)) to stay meaningful under rounding.
template <typename Scalar>
BoxQpResult<Scalar> solve_boxqp(const SymMatrix<Scalar>& w, const Vector<Scalar>& lower,
                                const Vector<Scalar>& upper, Scalar tol = Scalar(1e-10),
                                const Vector<Scalar>* warmStart = nullptr) {
  const Index n = w.rows();
  if (w.cols() != n || lower.size() != n || upper.size() != n)
    throw Error(ErrorCode::DimensionMismatch, "box QP sizes disagree");
  for (Index i = 0; i < n; ++i)
    if (!(lower(i) <= upper(i)))
      throw Error(ErrorCode::InfeasibleBounds, "empty box at coordinate " + std::to_string(i));

  BoxQpResult<Scalar> res;
  SymMatrix<Scalar> q = w;
  if (!is_positive_definite(q)) {
    const Scalar eps = Scalar(1e-10) * q.trace() / Scalar(std::max<Index>(n, 1));
    q.diagonal().array() += eps;
    if (!is_positive_definite(q))
      throw Error(ErrorCode::NotPositiveDefinite, "box QP matrix is not positive definite");
    res.ridged = true;
  }

  enum class State : char { Free, AtLower, AtUpper };
  std::vector<State> state(static_cast<size_t>(n), State::Free);
  Vector<Scalar> y = warmStart ? *warmStart : Vector<Scalar>::Zero(n);
  for (Index i = 0; i < n; ++i) {
    if (y(i) <= lower(i)) {
      y(i) = lower(i);
      state[i] = State::AtLower;
    } else if (y(i) >= upper(i)) {
      y(i) = upper(i);
      state[i] = State::AtUpper;
    }
  }

  const Scalar wScale = n > 0 ? q.cwiseAbs().maxCoeff() : Scalar(1);
  const int maxIter = 20 * static_cast<int>(n) + 100;
  std::vector<Index> freeIdx, fixedIdx;

  for (int it = 0; it < maxIter; ++it) {
    res.iterations = it + 1;
    freeIdx.clear();
    fixedIdx.clear();
    for (Index i = 0; i < n; ++i) (state[i] == State::Free ? freeIdx : fixedIdx).push_back(i);

    const Index nf = static_cast<Index>(freeIdx.size());
    Vector<Scalar> target(nf);
    if (nf > 0) {
      SymMatrix<Scalar> qff(nf, nf);
      Vector<Scalar> rhs = Vector<Scalar>::Zero(nf);
      for (Index a = 0; a < nf; ++a) {
        for (Index b = 0; b < nf; ++b) qff(a, b) = q(freeIdx[a], freeIdx[b]);
        for (Index c : fixedIdx) rhs(a) -= q(freeIdx[a], c) * y(c);
      }
      target = qff.llt().solve(rhs);
    }

    // Longest step toward the subspace minimizer that stays in the box.
    Scalar alpha = 1;
    Index blocking = -1;
    State blockingState = State::Free;
    for (Index a = 0; a < nf; ++a) {
      const Index i = freeIdx[a];
      const Scalar step = target(a) - y(i);
      if (target(a) < lower(i) && step < 0) {
        const Scalar t = (lower(i) - y(i)) / step;
        if (t < alpha) { alpha = t; blocking = i; blockingState = State::AtLower; }
      } else if (target(a) > upper(i) && step > 0) {
        const Scalar t = (upper(i) - y(i)) / step;
        if (t < alpha) { alpha = t; blocking = i; blockingState = State::AtUpper; }
      }
    }
    alpha = std::max(alpha, Scalar(0));
    for (Index a = 0; a < nf; ++a) {
      const Index i = freeIdx[a];
      y(i) = blocking < 0 ? target(a) : y(i) + alpha * (target(a) - y(i));
      y(i) = std::min(std::max(y(i), lower(i)), upper(i));
    }
    if (blocking >= 0) {
      state[blocking] = blockingState;
      y(blocking) = blockingState == State::AtLower ? lower(blocking) : upper(blocking);
      continue;
    }

    // Subspace optimum reached; release the worst wrong-signed multiplier.
    const Vector<Scalar> g = Scalar(2) * (q * y);
    const Scalar scaledTol =
        tol * std::max(Scalar(1), wScale * std::max(Scalar(1), y.cwiseAbs().maxCoeff()));
    Index release = -1;
    Scalar worst = scaledTol;
    for (Index i : fixedIdx) {
      const Scalar violation = state[i] == State::AtLower ? -g(i) : g(i);
      if (violation > worst) { worst = violation; release = i; }
    }
    if (release < 0) {
      res.y = y;
      return res;
    }
    state[release] = State::Free;
  }
  throw Error(ErrorCode::MaxIterationsExceeded,
              "box QP active set did not settle after " + std::to_string(maxIter) + " steps");
}

}  // namespace golazo
