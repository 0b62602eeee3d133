#include "golazo/estimators.hpp"

#include <algorithm>
#include <cmath>

namespace golazo {

double MdeConditions::max() const {
  const auto v = as_vector();
  return *std::max_element(v.begin(), v.end());
}

FitResultd ggm_mle(const SymMatrixd& s, const GraphSpec& g, const SolverConfig& config,
                   const SymMatrixd* start) {
  return fit(s, preset_bounds(Preset::ggm(g), s.rows()), config, start);
}

FitResultd dual_mle_edge_positivity_fit(const SymMatrixd& khat, const GraphSpec& g,
                                        const SolverConfig& config) {
  if (!is_positive_definite(khat))
    throw Error(ErrorCode::NotPositiveDefinite, "Khat must be positive definite");
  const auto bounds = preset_bounds(Preset::dual_positivity(g), khat.rows());
  auto meets_post = [&](const FitResultd& f) {
    for (auto [i, j] : g.edges()) {
      const double sc = f.Khat(i, j), kc = f.SigmaHat(i, j);
      if (sc < -1e-10 || kc > khat(i, j) + 1e-10 || std::abs(sc * (khat(i, j) - kc)) > 1e-8) return false;
    }
    return true;
  };
  SolverConfig cfg = config;
  FitResultd f = fit(khat, bounds, cfg);
  while (!meets_post(f) && cfg.dualGapTol > 1e-14) {
    cfg.dualGapTol = std::max(cfg.dualGapTol * 1e-2, 1e-14);
    f = fit(khat, bounds, cfg);
  }
  return f;
}

SymMatrixd dual_mle_edge_positivity(const SymMatrixd& khat, const GraphSpec& g,
                                    const SolverConfig& config) {
  return dual_mle_edge_positivity_fit(khat, g, config).Khat;
}

SymMatrixd dual_mle_zero_constraints(const SymMatrixd& khat, const GraphSpec& zeros,
                                     const SolverConfig& config) {
  if (!is_positive_definite(khat))
    throw Error(ErrorCode::NotPositiveDefinite, "Khat must be positive definite");
  // Zero constraints on the covariance are GGM-type bounds in swapped roles.
  const Index d = khat.rows();
  PenaltyBoundsd b{SymMatrixd::Zero(d, d), SymMatrixd::Zero(d, d)};
  for (auto [i, j] : zeros.edges()) {
    b.L(i, j) = b.L(j, i) = -infinity<double>();
    b.U(i, j) = b.U(j, i) = infinity<double>();
  }
  return fit(khat, b, config).Khat;
}

MdeConditions mde_conditions(const SymMatrixd& s, const GraphSpec& g, const SymMatrixd& khat,
                             const SymMatrixd& sigmaHat, const SymMatrixd& sigmaCheck,
                             const SymMatrixd& kcheck) {
  MdeConditions c;
  const Index d = s.rows();
  for (Index i = 0; i < d; ++i) {
    c.diagCovMatch = std::max(c.diagCovMatch, std::abs(sigmaHat(i, i) - s(i, i)));
    c.diagPrecisionMatch = std::max(c.diagPrecisionMatch, std::abs(kcheck(i, i) - khat(i, i)));
    for (Index j = i + 1; j < d; ++j) {
      if (g.has_edge(i, j)) {
        c.edgeCovNonneg = std::max(c.edgeCovNonneg, -sigmaCheck(i, j));
        c.edgeCovMatch = std::max(c.edgeCovMatch, std::abs(sigmaHat(i, j) - s(i, j)));
        c.edgePrecisionOrder = std::max(c.edgePrecisionOrder, kcheck(i, j) - khat(i, j));
        const double sc = std::abs(sigmaCheck(i, j));
        const double slack = sc * std::abs(khat(i, j) - kcheck(i, j)) /
                             (1.0 + sc + std::abs(khat(i, j)));
        c.slackness = std::max(c.slackness, slack);
      } else {
        c.offGraphZero = std::max({c.offGraphZero, std::abs(kcheck(i, j)), std::abs(khat(i, j)),
                                   std::abs(kcheck(i, j) - khat(i, j))});
      }
    }
  }
  return c;
}

MdeResult mde(const SymMatrixd& s, const GraphSpec& g, const SolverConfig& config) {
  MdeResult out;
  try {
    out.step1 = ggm_mle(s, g, config);
  } catch (const Error& e) {
    throw Error(ErrorCode::MdeStep1Failed, e.what());
  }
  out.Khat = out.step1.Khat;
  out.SigmaHat = out.step1.SigmaHat;
  out.step2 = dual_mle_edge_positivity_fit(out.Khat, g, config);
  out.SigmaCheck = out.step2.Khat;
  out.Kcheck = out.step2.SigmaHat;
  out.conditions = mde_conditions(s, g, out.Khat, out.SigmaHat, out.SigmaCheck, out.Kcheck);
  return out;
}

double kl_gaussian(const SymMatrixd& sigma1, const SymMatrixd& k2) {
  const double ld = log_det(sigma1) + log_det(k2);
  const double tr = sigma1.cwiseProduct(k2.transpose()).sum();
  return 0.5 * (tr - static_cast<double>(sigma1.rows())) - 0.5 * ld;
}

double gaussian_neg_loglik(const SymMatrixd& s, const SymMatrixd& k) {
  return -0.5 * log_det(k) + 0.5 * s.cwiseProduct(k.transpose()).sum();
}

bool is_locally_associated(const SymMatrixd& sigma, const GraphSpec& g, double tol) {
  if (!is_positive_definite(sigma)) return false;
  for (auto [i, j] : g.edges())
    if (sigma(i, j) < -tol) return false;
  return true;
}

bool is_markov(const SymMatrixd& k, const GraphSpec& g, double tol) {
  for (Index i = 0; i < k.rows(); ++i)
    for (Index j = i + 1; j < k.cols(); ++j)
      if (!g.has_edge(i, j) && std::abs(k(i, j)) > tol) return false;
  return true;
}

}  // namespace golazo
