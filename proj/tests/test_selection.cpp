#include <doctest.h>

#include <cmath>
#include <random>

#include "golazo/estimators.hpp"
#include "golazo/selection.hpp"
#include "test_support.hpp"

using namespace golazo;
using Eigen::MatrixXd;

TEST_CASE("ebic_score examples") {
  const double expected = 200.0 + 3.0 * (std::log(100.0) + 2.0 * std::log(5.0));
  CHECK(std::abs(ebic_score(2.0, 3, 100, 5, 0.5) - expected) < 1e-9);
  CHECK(std::abs(ebic_score(2.0, 3, 100, 5, 0.5) - 223.4721) < 1e-4);
  CHECK(ebic_score(1.25, 0, 40, 7, 0.5) == 40 * 1.25);
  // gamma = 0 is BIC
  CHECK(ebic_score(1.25, 4, 40, 7, 0.0) == 40 * 1.25 + 4 * std::log(40.0));
}

TEST_CASE("property: each edge adds log n + 4 gamma log d") {
  std::mt19937_64 rng(61);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const long n = 2 + long(u(rng) * 1000);
    const Index d = 2 + Index(u(rng) * 30);
    const double gamma = u(rng), nll = 5 * u(rng);
    const size_t e = size_t(u(rng) * 20);
    const double inc = ebic_score(nll, e + 1, n, d, gamma) - ebic_score(nll, e, n, d, gamma);
    CHECK(std::abs(inc - (std::log(double(n)) + 4 * gamma * std::log(double(d)))) < 1e-9);
  }
}

TEST_CASE("grids") {
  const auto g = default_grid();
  REQUIRE(g.size() == 20);
  CHECK(g.front() == 0.01);
  CHECK(g.back() == 1.0);
  for (size_t i = 1; i < g.size(); ++i) CHECK(g[i] / g[i - 1] == doctest::Approx(std::pow(100.0, 1.0 / 19)));
  CHECK_THROWS_AS(log_grid(0, 1, 3), Error);
}

TEST_CASE("identity S: every grid point ties, first is selected") {
  EbicConfig cfg;
  cfg.grid = {0.1, 0.2, 0.5};
  cfg.n = 50;
  const auto r = fit_path(MatrixXd::Identity(4, 4), preset_bounds(Preset::positive(1.0), 4), cfg);
  CHECK(r.selectedIndex == 0);
  CHECK(r.ebicScores[0] == r.ebicScores[1]);
  CHECK(r.ebicScores[1] == r.ebicScores[2]);
}

TEST_CASE("a penalty that empties the graph loses when the likelihood drop dominates") {
  MatrixXd s(3, 3);
  s << 1, 0.8, 0.6, 0.8, 1, 0.7, 0.6, 0.7, 1;
  EbicConfig cfg;
  cfg.grid = {0.01, 2.0};
  cfg.n = 200;
  cfg.gamma = 0.5;
  const auto r = fit_path(s, preset_bounds(Preset::glasso(1.0), 3), cfg);
  REQUIRE(r.fits[1]);
  CHECK(r.edgeCounts[1] == 0);
  // direct evaluation of both scores
  const auto by_hand = [&](const MatrixXd& k, size_t edges) {
    const double nll = -0.5 * std::log(k.determinant()) + 0.5 * (s * k).trace();
    return 200.0 * nll + double(edges) * (std::log(200.0) + 2.0 * std::log(3.0));
  };
  CHECK(std::abs(r.ebicScores[0] - by_hand(r.fits[0]->Khat, r.edgeCounts[0])) < 1e-9);
  CHECK(std::abs(r.ebicScores[1] - by_hand(MatrixXd::Identity(3, 3), 0)) < 1e-9);
  CHECK(r.ebicScores[0] < r.ebicScores[1]);
  CHECK(r.selectedIndex == 0);
}

TEST_CASE("selection does not depend on the thread count") {
  std::mt19937_64 rng(62);
  const MatrixXd s = testing_support::random_covariance(rng, 7, 30, true);
  EbicConfig cfg;
  cfg.grid = log_grid(0.01, 1.0, 8);
  cfg.n = 30;
  const auto base = preset_bounds(Preset::positive(1.0), 7);
  const auto one = fit_path(s, base, cfg, {}, 1);
  const auto four = fit_path(s, base, cfg, {}, 4);
  CHECK(one.selectedIndex == four.selectedIndex);
  for (size_t i = 0; i < cfg.grid.size(); ++i) {
    CHECK(one.ebicScores[i] == four.ebicScores[i]);
    CHECK(one.fits[i]->Khat == four.fits[i]->Khat);
  }
}

TEST_CASE("path validation and failure reporting") {
  EbicConfig cfg;
  cfg.grid = {0.2, 0.1};
  CHECK_THROWS_AS(fit_path(MatrixXd::Identity(2, 2), preset_bounds(Preset::glasso(1), 2), cfg), Error);
  cfg.grid = {0.1};
  cfg.gamma = 2;
  CHECK_THROWS_AS(fit_path(MatrixXd::Identity(2, 2), preset_bounds(Preset::glasso(1), 2), cfg), Error);

  cfg.gamma = 0.5;
  const MatrixXd ones = MatrixXd::Ones(2, 2);
  try {
    fit_path(ones, preset_bounds(Preset::dual_positivity(GraphSpec::complete(2)), 2), cfg);
    FAIL("expected AllFitsFailed");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AllFitsFailed);
  }
}
