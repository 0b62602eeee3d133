#include "golazo/selection.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "golazo/estimators.hpp"

namespace golazo {

std::vector<double> log_grid(double lo, double hi, int k) {
  if (!(lo > 0) || !(hi > lo) || k < 1)
    throw Error(ErrorCode::InvalidConfig, "log grid needs 0 < lo < hi and k >= 1");
  if (k == 1) return {lo};
  std::vector<double> out(static_cast<size_t>(k));
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < k; ++i) out[i] = std::exp(a + (b - a) * i / (k - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> default_grid() { return log_grid(0.01, 1.0, 20); }

double ebic_score(double negLogLik, size_t edges, long n, Index d, double gamma) {
  const double perEdge = std::log(static_cast<double>(n)) + 4.0 * gamma * std::log(double(d));
  return static_cast<double>(n) * negLogLik + static_cast<double>(edges) * perEdge;
}

double ebic(const SymMatrixd& s, const FitResultd& fit, long n, double gamma) {
  if (n < 1) throw Error(ErrorCode::InvalidConfig, "sample size must be at least 1");
  return ebic_score(gaussian_neg_loglik(s, fit.Khat), fit.edge_count(), n, s.rows(), gamma);
}

PathResult fit_path(const SymMatrixd& s, const PenaltyBoundsd& baseBounds,
                    const EbicConfig& config, const SolverConfig& solverConfig, int threads) {
  if (config.gamma < 0 || config.gamma > 1)
    throw Error(ErrorCode::InvalidConfig, "gamma must lie in [0, 1]");
  if (config.grid.empty()) throw Error(ErrorCode::InvalidConfig, "empty penalty grid");
  for (size_t i = 0; i < config.grid.size(); ++i) {
    if (!(config.grid[i] > 0)) throw Error(ErrorCode::InvalidConfig, "grid values must be positive");
    if (i > 0 && !(config.grid[i] > config.grid[i - 1]))
      throw Error(ErrorCode::InvalidConfig, "grid must be strictly increasing");
  }
  validate_bounds(baseBounds);

  const size_t m = config.grid.size();
  PathResult out;
  out.grid = config.grid;
  out.fits.resize(m);
  out.errors.assign(m, "");
  out.ebicScores.assign(m, std::numeric_limits<double>::quiet_NaN());
  out.edgeCounts.assign(m, 0);

  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t i = next++; i < m; i = next++) {
      try {
        auto f = fit(s, scale_bounds(baseBounds, config.grid[i]), solverConfig);
        out.ebicScores[i] = ebic(s, f, config.n, config.gamma);
        out.edgeCounts[i] = f.edge_count();
        out.fits[i] = std::move(f);
      } catch (const std::exception& e) {
        out.errors[i] = e.what();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(threads, static_cast<int>(m)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
  }

  bool any = false;
  for (size_t i = 0; i < m; ++i) {
    if (!out.fits[i]) continue;
    if (!any || out.ebicScores[i] < out.ebicScores[out.selectedIndex]) out.selectedIndex = i;
    any = true;
  }
  if (!any) throw Error(ErrorCode::AllFitsFailed, "no grid point could be fitted");
  return out;
}

}  // namespace golazo
