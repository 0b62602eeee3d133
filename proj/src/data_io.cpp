#include "golazo/data_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "golazo/estimators.hpp"
#include "golazo/solver.hpp"

namespace golazo {

void DagSpec::validate() const {
  if (d < 1) throw Error(ErrorCode::InvalidGraph, "DAG needs at least one vertex");
  if (static_cast<Index>(order.size()) != d || noiseVars.size() != d)
    throw Error(ErrorCode::DimensionMismatch, "order and noiseVars must have d entries");
  std::vector<Index> pos(static_cast<size_t>(d), -1);
  for (size_t k = 0; k < order.size(); ++k) {
    const Index v = order[k];
    if (v < 0 || v >= d || pos[v] >= 0) throw Error(ErrorCode::InvalidGraph, "order is not a permutation");
    pos[v] = static_cast<Index>(k);
  }
  for (const auto& e : edges) {
    if (e.child < 0 || e.child >= d || e.parent < 0 || e.parent >= d)
      throw Error(ErrorCode::InvalidGraph, "DAG edge endpoint out of range");
    if (!(pos[e.parent] < pos[e.child]))
      throw Error(ErrorCode::InvalidGraph, "DAG edge against the topological order");
  }
  for (Index i = 0; i < d; ++i)
    if (!(noiseVars(i) > 0)) throw Error(ErrorCode::InvalidConfig, "noise variances must be positive");
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

namespace {

Eigen::MatrixXd centered_values(const DataMatrix& x, bool centered) {
  Eigen::MatrixXd v = x.values;
  if (centered) v.rowwise() -= v.colwise().mean();
  return v;
}

}  // namespace

SymMatrixd sample_covariance(const DataMatrix& x, bool centered) {
  if (x.n() < 1 || x.d() < 1) throw Error(ErrorCode::DimensionTooSmall, "empty data matrix");
  const Eigen::MatrixXd v = centered_values(x, centered);
  SymMatrixd s = (v.transpose() * v) / static_cast<double>(x.n());
  return symmetrize(s);
}

std::vector<Index> constant_columns(const DataMatrix& x, bool centered) {
  const Eigen::MatrixXd v = centered_values(x, centered);
  std::vector<Index> out;
  for (Index j = 0; j < v.cols(); ++j)
    if (v.col(j).squaredNorm() == 0) out.push_back(j);
  return out;
}

SymMatrixd to_correlation(const SymMatrixd& s) {
  for (Index i = 0; i < s.rows(); ++i)
    if (!(s(i, i) > 0)) throw Error(ErrorCode::NonpositiveDiagonal, "S_ii <= 0 at " + std::to_string(i));
  const Eigen::VectorXd inv = s.diagonal().cwiseSqrt().cwiseInverse();
  SymMatrixd r = inv.asDiagonal() * s * inv.asDiagonal();
  r = symmetrize(r);
  r.diagonal().setOnes();
  return r;
}

double kendall_tau(const Eigen::VectorXd& a, const Eigen::VectorXd& b, KendallVariant variant) {
  const Index n = a.size();
  if (b.size() != n) throw Error(ErrorCode::DimensionMismatch, "columns differ in length");
  if (n < 2) throw Error(ErrorCode::DimensionTooSmall, "Kendall's tau needs n >= 2");
  long long concordant = 0, discordant = 0, tiesA = 0, tiesB = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double da = a(i) - a(j), db = b(i) - b(j);
      if (da == 0) ++tiesA;
      if (db == 0) ++tiesB;
      const double p = da * db;
      if (p > 0) ++concordant;
      else if (p < 0) ++discordant;
    }
  const double pairs = 0.5 * static_cast<double>(n) * static_cast<double>(n - 1);
  const double diff = static_cast<double>(concordant - discordant);
  if (variant == KendallVariant::TauA) return diff / pairs;
  const double denom = std::sqrt((pairs - double(tiesA)) * (pairs - double(tiesB)));
  return denom > 0 ? diff / denom : 0.0;
}

SymMatrixd skeptic_correlation(const DataMatrix& x, KendallVariant variant) {
  if (x.n() < 2) throw Error(ErrorCode::DimensionTooSmall, "SKEPTIC needs at least two rows");
  const Index d = x.d();
  SymMatrixd r = SymMatrixd::Identity(d, d);
  for (Index i = 0; i < d; ++i)
    for (Index j = i + 1; j < d; ++j) {
      const double tau = kendall_tau(x.values.col(i), x.values.col(j), variant);
      r(i, j) = r(j, i) = std::sin(std::numbers::pi / 2.0 * tau);
    }
  return r;
}

SymMatrixd nearest_correlation(const SymMatrixd& r, double floor) {
  Eigen::SelfAdjointEigenSolver<SymMatrixd> eig(symmetrize(r));
  const Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(floor);
  SymMatrixd out = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
  return to_correlation(symmetrize(out));
}

namespace {

SymMatrixd loading_matrix(const DagSpec& spec) {
  SymMatrixd lambda = SymMatrixd::Zero(spec.d, spec.d);
  for (const auto& e : spec.edges) lambda(e.child, e.parent) += e.loading;
  return lambda;
}

}  // namespace

SymMatrixd dag_covariance(const DagSpec& spec) {
  spec.validate();
  const Index d = spec.d;
  const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(d, d) - loading_matrix(spec);
  const Eigen::MatrixXd ainv = a.inverse();
  return symmetrize(ainv * spec.noiseVars.asDiagonal() * ainv.transpose());
}

DataMatrix sample_positive_dag(const DagSpec& spec, Index n, std::uint64_t seed,
                               bool requireNonnegative) {
  spec.validate();
  if (requireNonnegative)
    for (const auto& e : spec.edges)
      if (e.loading < 0)
        throw Error(ErrorCode::NegativeLoadingInPositiveMode,
                    "loading " + std::to_string(e.parent) + "->" + std::to_string(e.child) + " < 0");
  const SymMatrixd lambda = loading_matrix(spec);
  const Eigen::VectorXd sd = spec.noiseVars.cwiseSqrt();
  auto rng = make_rng(seed);
  std::normal_distribution<double> normal;
  DataMatrix x;
  x.values.resize(n, spec.d);
  for (Index row = 0; row < n; ++row)
    for (Index v : spec.order) {
      double y = sd(v) * normal(rng);
      for (Index p = 0; p < spec.d; ++p)
        if (lambda(v, p) != 0) y += lambda(v, p) * x.values(row, p);
      x.values(row, v) = y;
    }
  return x;
}

DataMatrix sample_gaussian(const SymMatrixd& sigma, Index n, std::uint64_t seed) {
  const auto chol = cholesky_logdet(sigma);
  auto rng = make_rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd z(n, sigma.rows());
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < sigma.rows(); ++j) z(i, j) = normal(rng);
  DataMatrix x;
  x.values = z * chol.factor.transpose();
  return x;
}

SymMatrixd sample_locally_associated(const GraphSpec& g, std::uint64_t seed) {
  const Index d = g.dim();
  auto rng = make_rng(seed);
  std::uniform_real_distribution<double> loading(0.2, 0.8), noise(0.5, 1.5), entry(0.0, 1.0);

  if (is_decomposable(g)) {
    // Parents = earlier neighbours in MCS order: cliques, so no immoralities.
    const auto order = max_cardinality_order(g);
    std::vector<Index> pos(static_cast<size_t>(d));
    for (size_t k = 0; k < order.size(); ++k) pos[order[k]] = static_cast<Index>(k);
    DagSpec spec;
    spec.d = d;
    spec.order = order;
    spec.noiseVars.resize(d);
    for (Index v : order) {
      spec.noiseVars(v) = noise(rng);
      const auto nb = g.neighbours(v);
      for (Index u : nb)
        if (pos[u] < pos[v]) spec.edges.push_back({v, u, loading(rng) / double(nb.size())});
    }
    return dag_covariance(spec);
  }

  SolverConfig cfg;
  cfg.dualGapTol = 1e-12;
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Eigen::MatrixXd a(d, d + 2);
    for (Index i = 0; i < a.rows(); ++i)
      for (Index j = 0; j < a.cols(); ++j) a(i, j) = entry(rng);
    SymMatrixd w = a * a.transpose() / double(a.cols());
    for (Index i = 0; i < d; ++i) w(i, i) += noise(rng);
    try {
      SymMatrixd k = ggm_mle(symmetrize(w), g, cfg).Khat;
      for (Index i = 0; i < d; ++i)
        for (Index j = 0; j < d; ++j)
          if (i != j && !g.has_edge(i, j)) k(i, j) = 0;
      if (!is_positive_definite(k)) continue;
      SymMatrixd sigma = invert_pd(k);
      if (is_locally_associated(sigma, g, 0.0) && is_markov(invert_pd(sigma), g, 1e-12))
        return sigma;
    } catch (const Error&) {
      continue;
    }
  }
  throw Error(ErrorCode::GenerationFailed, "no M+(G) instance after 1000 attempts");
}

// ---------------------------------------------------------------------------
// Files

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& tok, const std::string& where) {
  if (tok == "inf" || tok == "+inf") return infinity<double>();
  if (tok == "-inf") return -infinity<double>();
  double v = 0;
  const char* first = tok.data();
  if (!tok.empty() && tok[0] == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, tok.data() + tok.size(), v);
  if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size() || std::isnan(v))
    throw Error(ErrorCode::Parse, "bad number '" + tok + "' " + where);
  return v;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Table read_table(const std::string& path, bool header) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path);
  Table t;
  std::string line;
  size_t lineNo = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineNo;
    if (trim(line).empty()) continue;
    auto cells = split_csv(line);
    if (first && !cells.empty() && cells[0].size() >= 3 && cells[0].substr(0, 3) == "\xEF\xBB\xBF")
      cells[0] = cells[0].substr(3);
    if (first && header) {
      t.header = cells;
      first = false;
      continue;
    }
    first = false;
    std::vector<double> row;
    row.reserve(cells.size());
    for (size_t c = 0; c < cells.size(); ++c)
      row.push_back(parse_number(cells[c], "at " + path + ":" + std::to_string(lineNo) + " column " +
                                               std::to_string(c + 1)));
    if (!t.rows.empty() && row.size() != t.rows.front().size())
      throw Error(ErrorCode::Parse, "ragged row at " + path + ":" + std::to_string(lineNo));
    t.rows.push_back(std::move(row));
  }
  if (t.rows.empty()) throw Error(ErrorCode::Parse, "no data rows in " + path);
  if (!t.header.empty() && t.header.size() != t.rows.front().size())
    throw Error(ErrorCode::Parse, "header width differs from data in " + path);
  return t;
}

Eigen::MatrixXd to_matrix(const Table& t) {
  Eigen::MatrixXd m(static_cast<Index>(t.rows.size()), static_cast<Index>(t.rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) m(i, j) = t.rows[i][j];
  return m;
}

Eigen::MatrixXd read_square(const std::string& path, bool header) {
  const Eigen::MatrixXd m = to_matrix(read_table(path, header));
  if (m.rows() != m.cols())
    throw Error(ErrorCode::Parse, path + " is not square (" + std::to_string(m.rows()) + "x" +
                                      std::to_string(m.cols()) + ")");
  return m;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Parse, "cannot write " + path);
  return out;
}

}  // namespace

DataMatrix read_data_csv(const std::string& path, bool header) {
  const Table t = read_table(path, header);
  DataMatrix x;
  x.values = to_matrix(t);
  for (Index i = 0; i < x.values.rows(); ++i)
    for (Index j = 0; j < x.values.cols(); ++j)
      if (!std::isfinite(x.values(i, j))) throw Error(ErrorCode::Parse, "non-finite value in " + path);
  x.columnNames = t.header;
  return x;
}

SymMatrixd read_matrix_csv(const std::string& path, bool header) {
  const Eigen::MatrixXd m = read_square(path, header);
  if (!m.allFinite()) throw Error(ErrorCode::Parse, "non-finite value in " + path);
  if (!is_symmetric(m, 1e-9)) throw Error(ErrorCode::Parse, path + " is not symmetric within 1e-9");
  return symmetrize(m);
}

PenaltyBoundsd read_bounds_csv(const std::string& lowerPath, const std::string& upperPath) {
  PenaltyBoundsd b{read_square(lowerPath, false), read_square(upperPath, false)};
  if (b.L.rows() != b.U.rows()) throw Error(ErrorCode::Parse, "bounds files differ in size");
  validate_bounds(b);
  return b;
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  auto out = open_out(path);
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) out << (j ? "," : "") << format_double(m(i, j));
    out << '\n';
  }
}

GraphSpec read_edge_list(const std::string& path, Index d) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Parse, "cannot open " + path);
  GraphSpec g(d);
  std::string line;
  size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    std::istringstream ss(line);
    long long i = 0, j = 0;
    std::string extra;
    if (!(ss >> i >> j) || (ss >> extra))
      throw Error(ErrorCode::Parse, "expected 'i j' at " + path + ":" + std::to_string(lineNo));
    if (i < 1 || j < 1 || i > d || j > d || i == j)
      throw Error(ErrorCode::Parse, "invalid edge at " + path + ":" + std::to_string(lineNo));
    g.add_edge(static_cast<Index>(i - 1), static_cast<Index>(j - 1));
  }
  return g;
}

void write_edge_list(const std::string& path, const GraphSpec& g) {
  auto out = open_out(path);
  for (auto [i, j] : g.edges()) out << i + 1 << ' ' << j + 1 << '\n';
}

void write_graphml(const std::string& path, const SymMatrixd& k, const GraphSpec& g,
                   const std::vector<std::string>& names) {
  auto out = open_out(path);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
         "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
         "  <key id=\"pc\" for=\"edge\" attr.name=\"partialCorrelation\" attr.type=\"double\"/>\n"
         "  <graph id=\"G\" edgedefault=\"undirected\">\n";
  auto escape = [](const std::string& s) {
    std::string r;
    for (char c : s) {
      switch (c) {
        case '&': r += "&amp;"; break;
        case '<': r += "&lt;"; break;
        case '>': r += "&gt;"; break;
        case '"': r += "&quot;"; break;
        default: r += c;
      }
    }
    return r;
  };
  for (Index v = 0; v < g.dim(); ++v) {
    const std::string label = static_cast<size_t>(v) < names.size() ? names[v] : std::to_string(v + 1);
    out << "    <node id=\"n" << v + 1 << "\"><data key=\"label\">" << escape(label)
        << "</data></node>\n";
  }
  for (auto [i, j] : g.edges()) {
    const double pc = -k(i, j) / std::sqrt(k(i, i) * k(j, j));
    out << "    <edge source=\"n" << i + 1 << "\" target=\"n" << j + 1 << "\"><data key=\"pc\">"
        << format_double(pc) << "</data></edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
}

}  // namespace golazo
