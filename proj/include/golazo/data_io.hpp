#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "golazo/graph.hpp"
#include "golazo/matrix_core.hpp"
#include "golazo/penalty.hpp"

namespace golazo {

/// n observations (rows) by d variables (columns).
struct DataMatrix {
  Eigen::MatrixXd values;
  std::vector<std::string> columnNames;  // empty or one per column

  Index n() const { return values.rows(); }
  Index d() const { return values.cols(); }
};

/// Linear structural equation model Y_i = sum_j lambda_ij Y_j + eps_i with
/// independent eps_i ~ N(0, omega_i). Every parent precedes its child in
/// `order`.
struct DagSpec {
  struct Edge {
    Index child;
    Index parent;
    double loading;
  };
  Index d = 0;
  std::vector<Index> order;
  std::vector<Edge> edges;
  Eigen::VectorXd noiseVars;

  void validate() const;
};

/// Engine for stream `stream` of `seed`. Distinct streams are independent,
/// so work split across threads draws the same numbers at any thread count.
std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0);

/// X'X / n, after subtracting column means when `centered`.
SymMatrixd sample_covariance(const DataMatrix& x, bool centered = true);
/// Columns whose variance is zero (after centering when `centered`).
std::vector<Index> constant_columns(const DataMatrix& x, bool centered = true);

SymMatrixd to_correlation(const SymMatrixd& s);

enum class KendallVariant { TauA, TauB };

/// Kendall's tau over all observation pairs, O(n^2). Tied pairs count as
/// neither concordant nor discordant; tau-b additionally normalizes by the
/// untied pair counts. A constant column gives tau = 0.
double kendall_tau(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                   KendallVariant variant = KendallVariant::TauA);

/// Rank-based correlation sin(pi/2 * tau_ij) with unit diagonal. Not
/// necessarily positive semidefinite.
SymMatrixd skeptic_correlation(const DataMatrix& x, KendallVariant variant = KendallVariant::TauA);

/// Eigenvalues clipped at `floor`, then rescaled to unit diagonal.
SymMatrixd nearest_correlation(const SymMatrixd& r, double floor = 1e-6);

/// (I - Lambda)^-1 Omega (I - Lambda)^-T.
SymMatrixd dag_covariance(const DagSpec& spec);

/// n rows drawn from N(0, dag_covariance(spec)) by ancestral sampling. With
/// `requireNonnegative`, any negative loading is rejected.
DataMatrix sample_positive_dag(const DagSpec& spec, Index n, std::uint64_t seed,
                               bool requireNonnegative = true);

/// Draws N(0, sigma) rows using a Cholesky factor.
DataMatrix sample_gaussian(const SymMatrixd& sigma, Index n, std::uint64_t seed);

/// Random Sigma in M+(G): Markov to G and nonnegative on the edges of G.
/// Chordal G: nonnegative-loading DAG along a perfect elimination order.
/// Otherwise: GGM completion of a nonnegative random covariance, retried up
/// to 1000 times.
SymMatrixd sample_locally_associated(const GraphSpec& g, std::uint64_t seed);

// CSV and graph files. Separator ',', decimal point '.'.

DataMatrix read_data_csv(const std::string& path, bool header);
/// Square matrix CSV; rejected unless symmetric within 1e-9, then averaged
/// with its transpose.
SymMatrixd read_matrix_csv(const std::string& path, bool header);
/// Bounds from a pair of matrix CSVs; "inf" and "-inf" denote infinities.
PenaltyBoundsd read_bounds_csv(const std::string& lowerPath, const std::string& upperPath);
/// Writes 17 significant digits per entry.
void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m);
std::string format_double(double v);

/// One "i j" pair per line, 1-based. Blank lines and '#' comments ignored.
GraphSpec read_edge_list(const std::string& path, Index d);
void write_edge_list(const std::string& path, const GraphSpec& g);
/// GraphML with the partial correlation -K_ij / sqrt(K_ii K_jj) on each edge.
void write_graphml(const std::string& path, const SymMatrixd& k, const GraphSpec& g,
                   const std::vector<std::string>& names = {});

}  // namespace golazo
