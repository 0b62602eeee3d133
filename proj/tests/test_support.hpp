#pragma once

#include <Eigen/Dense>

#include <random>
#include <vector>

#include "golazo/graph.hpp"

namespace testing_support {

using Eigen::MatrixXd;

/// Sample covariance (uncentered) of n standard normal rows after mixing
/// columns, scaled to unit diagonal when `correlation`.
inline MatrixXd random_covariance(std::mt19937_64& rng, int d, int n, bool correlation = true) {
  std::normal_distribution<double> normal;
  MatrixXd mix = MatrixXd::Identity(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      if (i != j) mix(i, j) = 0.4 * normal(rng);
  MatrixXd z(n, d);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) z(i, j) = normal(rng);
  const MatrixXd x = z * mix;
  MatrixXd s = x.transpose() * x / double(n);
  s = (0.5 * (s + s.transpose())).eval();
  if (correlation) {
    const Eigen::VectorXd inv = s.diagonal().cwiseSqrt().cwiseInverse();
    s = inv.asDiagonal() * s * inv.asDiagonal();
    s = (0.5 * (s + s.transpose())).eval();
    s.diagonal().setOnes();
  }
  return s;
}

/// Random factor * factor' + eps I.
inline MatrixXd random_pd(std::mt19937_64& rng, int d, double eps = 0.1) {
  std::normal_distribution<double> normal;
  MatrixXd f(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) f(i, j) = normal(rng);
  MatrixXd a = f * f.transpose() + eps * MatrixXd::Identity(d, d);
  return 0.5 * (a + a.transpose());
}

/// Random correlation matrix with entries of both signs.
inline MatrixXd random_correlation(std::mt19937_64& rng, int d) {
  return random_covariance(rng, d, d + 3, true);
}

inline golazo::GraphSpec random_graph(std::mt19937_64& rng, int d, double p) {
  std::bernoulli_distribution coin(p);
  golazo::GraphSpec g(d);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (coin(rng)) g.add_edge(i, j);
  return g;
}

inline std::vector<std::pair<int, int>> edge_pairs(const golazo::GraphSpec& g) {
  std::vector<std::pair<int, int>> out;
  for (auto [i, j] : g.edges()) out.emplace_back(int(i), int(j));
  return out;
}

}  // namespace testing_support
