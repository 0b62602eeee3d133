#pragma once

#include <vector>

#include "golazo/graph.hpp"
#include "golazo/solver.hpp"

namespace golazo {

/// Residuals of the optimality system characterizing the mixed dual
/// estimate under the locally associated model M+(G). Each entry is a
/// maximum over the pairs it ranges over; all vanish at the exact solution.
struct MdeConditions {
  double edgeCovNonneg = 0;      // (i)   max(0, -SigmaCheck_ij), ij in E
  double edgeCovMatch = 0;       // (ii)  |SigmaHat_ij - S_ij|, ij in E
  double diagCovMatch = 0;       // (iii) |SigmaHat_ii - S_ii|
  double offGraphZero = 0;       // (iv)  |Kcheck_ij|, |Khat_ij|, ij not in E
  double edgePrecisionOrder = 0; // (v)   max(0, Kcheck_ij - Khat_ij), ij in E
  double diagPrecisionMatch = 0; // (vi)  |Kcheck_ii - Khat_ii|
  double slackness = 0;          // (vii) |SigmaCheck_ij||Khat_ij - Kcheck_ij| / (1 + |SigmaCheck_ij| + |Khat_ij|)

  std::vector<double> as_vector() const {
    return {edgeCovNonneg, edgeCovMatch,       diagCovMatch, offGraphZero,
            edgePrecisionOrder, diagPrecisionMatch, slackness};
  }
  double max() const;
  bool satisfied(double tol = 1e-7) const { return max() <= tol; }
};

struct MdeResult {
  SymMatrixd Khat;        // step one: MLE over M(G)
  SymMatrixd SigmaHat;    // Khat^-1
  SymMatrixd SigmaCheck;  // step two: dual MLE under edge positivity
  SymMatrixd Kcheck;      // SigmaCheck^-1
  MdeConditions conditions;
  FitResultd step1;
  FitResultd step2;
};

/// Gaussian graphical model MLE: K_ij = 0 off G, Sigma matches S on the
/// diagonal and on the edges of G.
FitResultd ggm_mle(const SymMatrixd& s, const GraphSpec& g, const SolverConfig& config = {},
                   const SymMatrixd* start = nullptr);

/// Solves  min -log det Sigma + tr(Sigma Khat)  s.t. Sigma_ij >= 0 on E(G)
/// by running the dual solver with roles swapped: Khat as data, bounds
/// (-inf, 0) on edges and (0, 0) elsewhere. In the returned fit, Khat holds
/// the covariance estimate and SigmaHat its inverse. The gap tolerance is
/// tightened (down to 1e-14) until edge signs hold to 1e-10 and slackness to 1e-8.
FitResultd dual_mle_edge_positivity_fit(const SymMatrixd& khat, const GraphSpec& g,
                                        const SolverConfig& config = {});

/// Covariance part of dual_mle_edge_positivity_fit.
SymMatrixd dual_mle_edge_positivity(const SymMatrixd& khat, const GraphSpec& g,
                                    const SolverConfig& config = {});

/// Dual likelihood estimate with Sigma_ij = 0 on the edges of `zeros` and
/// Sigma^-1 matching Khat on every other entry (the linear model B(G')).
SymMatrixd dual_mle_zero_constraints(const SymMatrixd& khat, const GraphSpec& zeros,
                                     const SolverConfig& config = {});

MdeConditions mde_conditions(const SymMatrixd& s, const GraphSpec& g, const SymMatrixd& khat,
                             const SymMatrixd& sigmaHat, const SymMatrixd& sigmaCheck,
                             const SymMatrixd& kcheck);

/// Mixed dual estimator for the locally associated graphical model M+(G):
/// step one fits the GGM over M(G), step two projects onto edge-nonnegative
/// covariances. Step-one solver failures surface as MdeStep1Failed.
MdeResult mde(const SymMatrixd& s, const GraphSpec& g, const SolverConfig& config = {});

/// KL(N(0, Sigma1) || N(0, K2^-1)) = tr(Sigma1 K2 - I)/2 - log det(Sigma1 K2)/2.
double kl_gaussian(const SymMatrixd& sigma1, const SymMatrixd& k2);

/// -l(K) = -log det(K)/2 + tr(S K)/2.
double gaussian_neg_loglik(const SymMatrixd& s, const SymMatrixd& k);

bool is_locally_associated(const SymMatrixd& sigma, const GraphSpec& g, double tol);
bool is_markov(const SymMatrixd& k, const GraphSpec& g, double tol);

}  // namespace golazo
