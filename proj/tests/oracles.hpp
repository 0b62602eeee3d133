#pragma once

// Independent reference routines used only by tests. None of these call into
// the solver; they share nothing with the library beyond Eigen.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Determinant by cofactor expansion along the first row.
inline double cofactor_det(const MatrixXd& a) {
  const auto n = a.rows();
  if (n == 1) return a(0, 0);
  if (n == 2) return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
  double det = 0;
  for (Eigen::Index c = 0; c < n; ++c) {
    MatrixXd minor(n - 1, n - 1);
    for (Eigen::Index i = 1; i < n; ++i)
      for (Eigen::Index j = 0, mj = 0; j < n; ++j) {
        if (j == c) continue;
        minor(i - 1, mj++) = a(i, j);
      }
    det += ((c % 2) ? -1.0 : 1.0) * a(0, c) * cofactor_det(minor);
  }
  return det;
}

/// Projected gradient for min y'Wy on a finite box, fixed step 1/(2 lambda_max).
inline VectorXd boxqp_projected_gradient(const MatrixXd& w, const VectorXd& lo, const VectorXd& hi,
                                         int iterations = 100000) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(w, Eigen::EigenvaluesOnly);
  const double lmax = eig.eigenvalues().maxCoeff();
  const double step = 1.0 / (2.0 * lmax);
  VectorXd y = VectorXd::Zero(w.rows()).cwiseMax(lo).cwiseMin(hi);
  for (int it = 0; it < iterations; ++it) {
    VectorXd next = (y - step * 2.0 * (w * y)).cwiseMax(lo).cwiseMin(hi);
    if ((next - y).cwiseAbs().maxCoeff() < 1e-16) {
      y = next;
      break;
    }
    y = next;
  }
  return y;
}

inline bool pd(const MatrixXd& a) {
  Eigen::LLT<MatrixXd> llt(a);
  return llt.info() == Eigen::Success;
}

/// Proximal gradient (ISTA with backtracking) for the weighted graphical
/// lasso primal
///   minimize -log det K + tr(S K) + rho * sum_{i != j} |K_ij|.
/// Diagonal unpenalized.
inline MatrixXd glasso_prox_gradient(const MatrixXd& s, double rho, int maxIter = 200000,
                                     double tol = 1e-13) {
  const auto d = s.rows();
  auto smooth = [&](const MatrixXd& k) {
    Eigen::LLT<MatrixXd> llt(k);
    return -2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum() + (s * k).trace();
  };
  auto prox = [&](const MatrixXd& a, double t) {
    MatrixXd out = a;
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) {
        if (i == j) continue;
        const double v = a(i, j);
        out(i, j) = std::copysign(std::max(std::abs(v) - t * rho, 0.0), v);
      }
    return out;
  };
  MatrixXd k = s.diagonal().cwiseInverse().asDiagonal();
  double t = 1.0;
  for (int it = 0; it < maxIter; ++it) {
    const MatrixXd grad = s - k.inverse();
    const double f0 = smooth(k);
    MatrixXd next;
    t = std::min(t * 2.0, 10.0);
    for (;;) {
      next = prox(k - t * grad, t);
      next = (0.5 * (next + next.transpose())).eval();
      if (pd(next)) {
        const MatrixXd diff = next - k;
        const double quad = f0 + (grad.cwiseProduct(diff)).sum() + diff.squaredNorm() / (2 * t);
        if (smooth(next) <= quad + 1e-15) break;
      }
      t *= 0.5;
    }
    const double change = (next - k).cwiseAbs().maxCoeff();
    k = next;
    if (change < tol) break;
  }
  return k;
}

/// Iterative proportional scaling for the Gaussian graphical model MLE,
/// cycling over the maximal cliques of the graph (enumerated by brute force,
/// so keep d small). Stops once every clique margin of K^-1 matches S.
inline MatrixXd ips_ggm(const MatrixXd& s, const std::vector<std::pair<int, int>>& edges,
                        int maxCycles = 200000, double tol = 1e-13) {
  const int d = static_cast<int>(s.rows());
  std::vector<std::vector<char>> adj(d, std::vector<char>(d, 0));
  for (auto [i, j] : edges) adj[i][j] = adj[j][i] = 1;
  auto is_clique = [&](unsigned mask) {
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        if ((mask >> i & 1u) && (mask >> j & 1u) && !adj[i][j]) return false;
    return true;
  };
  std::vector<std::vector<int>> cliques;
  for (unsigned mask = 1; mask < (1u << d); ++mask) {
    if (!is_clique(mask)) continue;
    bool maximal = true;
    for (int v = 0; v < d && maximal; ++v)
      if (!(mask >> v & 1u) && is_clique(mask | (1u << v))) maximal = false;
    if (!maximal) continue;
    std::vector<int> c;
    for (int v = 0; v < d; ++v)
      if (mask >> v & 1u) c.push_back(v);
    cliques.push_back(c);
  }
  auto margin = [&](const std::vector<int>& c, const MatrixXd& m) {
    const int n = static_cast<int>(c.size());
    MatrixXd out(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) out(a, b) = m(c[a], c[b]);
    return out;
  };
  const double scale = s.cwiseAbs().maxCoeff();
  MatrixXd k = s.diagonal().cwiseInverse().asDiagonal();
  for (int cycle = 0; cycle < maxCycles; ++cycle) {
    for (const auto& c : cliques) {
      const MatrixXd delta = margin(c, s).inverse() - margin(c, k.inverse()).inverse();
      for (size_t a = 0; a < c.size(); ++a)
        for (size_t b = 0; b < c.size(); ++b) k(c[a], c[b]) += delta(a, b);
      k = (0.5 * (k + k.transpose())).eval();
    }
    const MatrixXd sigma = k.inverse();
    double worst = 0;
    for (const auto& c : cliques)
      worst = std::max(worst, (margin(c, sigma) - margin(c, s)).cwiseAbs().maxCoeff());
    if (worst < tol * scale) break;
  }
  return k;
}

/// Max-min bottleneck over all simple paths through positive entries, by
/// exhaustive depth-first enumeration.
inline MatrixXd single_linkage_bruteforce(const MatrixXd& r) {
  const int d = static_cast<int>(r.rows());
  MatrixXd z = MatrixXd::Identity(d, d);
  std::vector<char> onPath(d, 0);
  std::function<void(int, int, double, int)> dfs = [&](int start, int v, double bottleneck,
                                                       int depth) {
    if (depth > 0 && bottleneck > z(start, v)) z(start, v) = bottleneck;
    onPath[v] = 1;
    for (int u = 0; u < d; ++u)
      if (!onPath[u] && r(v, u) > 0) dfs(start, u, std::min(bottleneck, r(v, u)), depth + 1);
    onPath[v] = 0;
  };
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j)
      if (j != i) z(i, j) = 0;
    dfs(i, i, std::numeric_limits<double>::infinity(), 0);
  }
  return z;
}

}  // namespace oracle
