#pragma once

#include <optional>
#include <string>
#include <vector>

#include "golazo/solver.hpp"

namespace golazo {

struct EbicConfig {
  double gamma = 0.5;
  std::vector<double> grid;  // strictly increasing positive scale factors
  long n = 1;                // sample size
};

struct PathResult {
  std::vector<double> grid;
  std::vector<std::optional<FitResultd>> fits;  // empty where the fit failed
  std::vector<std::string> errors;              // failure message per point, "" on success
  std::vector<double> ebicScores;               // NaN where the fit failed
  std::vector<size_t> edgeCounts;
  size_t selectedIndex = 0;

  const FitResultd& selected() const { return *fits[selectedIndex]; }
};

/// `k` log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int k);
/// 20 log-spaced points on [0.01, 1].
std::vector<double> default_grid();

/// n * negLogLik + edges * (log n + 4 gamma log d).
double ebic_score(double negLogLik, size_t edges, long n, Index d, double gamma);

/// EBIC of a fit against the matrix it was fitted to; edges are pairs with
/// |K_ij| above the fit's sign threshold.
double ebic(const SymMatrixd& s, const FitResultd& fit, long n, double gamma);

/// Fits rho * (L, U) for every rho in the grid, concurrently on up to
/// `threads` workers, and selects the smallest EBIC (ties to the smaller
/// rho). Results are indexed by grid position independent of scheduling.
PathResult fit_path(const SymMatrixd& s, const PenaltyBoundsd& baseBounds,
                    const EbicConfig& config, const SolverConfig& solverConfig = {},
                    int threads = 1);

}  // namespace golazo
