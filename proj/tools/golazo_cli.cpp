// Command-line front end: fit, path, mde, skeptic, simulate.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "golazo/data_io.hpp"
#include "golazo/estimators.hpp"
#include "golazo/selection.hpp"
#include "golazo/solver.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace golazo;

namespace {

enum ExitCode : int {
  kOk = 0,
  kOther = 1,
  kNoFeasibleStart = 2,
  kMaxSweeps = 3,
  kUsage = 4,
  kAllFitsFailed = 5,
  kMdeStep1 = 6,
};

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::NoFeasibleStart: return kNoFeasibleStart;
    case ErrorCode::MaxSweepsExceeded: return kMaxSweeps;
    case ErrorCode::AllFitsFailed: return kAllFitsFailed;
    case ErrorCode::MdeStep1Failed: return kMdeStep1;
    case ErrorCode::Parse:
    case ErrorCode::InvalidConfig:
    case ErrorCode::InvalidGraph:
    case ErrorCode::InvalidBounds:
    case ErrorCode::NegativePenalty:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::DimensionTooSmall: return kUsage;
    default: return kOther;
  }
}

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunManifest {
  std::string command;
  std::string input;
  std::string inputKind;
  bool header = false;
  bool standardize = false;
  long n = 0;  // 0: unknown
  std::string preset;
  double rho = -1, rhoNeg = -1, rhoPos = -1;
  std::string boundsL, boundsU;
  std::string graph;
  std::string truth;
  double gamma = 0.5;
  std::string grid;
  double tol = 1e-8;
  int maxSweeps = 1000;
  int threads = 1;
  std::uint64_t seed = 0;
  std::string out = ".";
  bool graphml = false;
  bool tauB = false;
  bool verbose = false;
  // simulate
  long rows = 100;
  long dim = 0;
};

struct Input {
  SymMatrixd s;
  long n = 0;
  std::vector<std::string> names;
};

void require_file(const std::string& path, const std::string& flag) {
  if (path.empty()) throw UsageError(flag + " is required");
  if (!fs::exists(path)) throw UsageError(flag + ": no such file '" + path + "'");
}

Input load_input(const RunManifest& m) {
  require_file(m.input, "--input");
  if (m.inputKind.empty()) throw UsageError("--input-kind {data, covariance, correlation} is required");
  Input in;
  if (m.inputKind == "data") {
    const DataMatrix x = read_data_csv(m.input, m.header);
    for (Index j : constant_columns(x, true))
      std::cerr << "warning: ConstantColumn(" << j + 1 << ")\n";
    in.s = sample_covariance(x, true);
    if (m.standardize) in.s = to_correlation(in.s);
    in.n = static_cast<long>(x.n());
    in.names = x.columnNames;
  } else {
    in.s = read_matrix_csv(m.input, m.header);
    if (m.inputKind == "correlation") {
      for (Index i = 0; i < in.s.rows(); ++i)
        if (std::abs(in.s(i, i) - 1.0) > 1e-9)
          throw Error(ErrorCode::Parse, "correlation input needs a unit diagonal");
    } else if (m.standardize) {
      in.s = to_correlation(in.s);
    }
    in.n = m.n;
  }
  if (m.n > 0) in.n = m.n;
  if (definiteness(in.s).status == DefinitenessStatus::Indefinite) {
    std::cerr << "warning: input matrix is indefinite; projecting to the nearest matrix with "
                 "eigenvalues >= 1e-6 (correlation scale)\n";
    const Eigen::VectorXd sd = in.s.diagonal().cwiseSqrt();
    in.s = symmetrize(SymMatrixd(sd.asDiagonal() * nearest_correlation(to_correlation(in.s)) *
                                 sd.asDiagonal()));
  }
  return in;
}

PresetKind parse_preset(const std::string& p) {
  if (p == "glasso") return PresetKind::Glasso;
  if (p == "asymmetric") return PresetKind::Asymmetric;
  if (p == "positive") return PresetKind::Positive;
  if (p == "mtp2") return PresetKind::Mtp2;
  if (p == "ggm") return PresetKind::Ggm;
  if (p == "dual-positivity") return PresetKind::DualPositivity;
  throw UsageError("unknown preset '" + p + "'");
}

PenaltyBoundsd load_bounds(const RunManifest& m, Index d, double defaultRho) {
  if (!m.boundsL.empty() || !m.boundsU.empty()) {
    require_file(m.boundsL, "--bounds-l");
    require_file(m.boundsU, "--bounds-u");
    auto b = read_bounds_csv(m.boundsL, m.boundsU);
    if (b.dim() != d) throw UsageError("bounds size differs from the input dimension");
    return b;
  }
  if (m.preset.empty()) throw UsageError("--preset or --bounds-l/--bounds-u is required");
  Preset p;
  p.kind = parse_preset(m.preset);
  auto need = [&](double v, const char* flag) {
    if (v < 0 && defaultRho < 0) throw UsageError(std::string(flag) + " is required for this preset");
    return v < 0 ? defaultRho : v;
  };
  switch (p.kind) {
    case PresetKind::Glasso:
    case PresetKind::Positive: p.rho = need(m.rho, "--rho"); break;
    case PresetKind::Asymmetric:
      p.rhoNeg = need(m.rhoNeg, "--rho-neg");
      p.rhoPos = need(m.rhoPos, "--rho-pos");
      break;
    case PresetKind::Ggm:
    case PresetKind::DualPositivity:
      require_file(m.graph, "--graph");
      p.graph = read_edge_list(m.graph, d);
      break;
    case PresetKind::Mtp2: break;
  }
  return preset_bounds(p, d);
}

std::vector<double> parse_grid(const std::string& spec) {
  if (spec.empty()) return default_grid();
  if (spec.rfind("log:", 0) == 0) {
    std::stringstream ss(spec.substr(4));
    std::string lo, hi, k;
    if (!std::getline(ss, lo, ':') || !std::getline(ss, hi, ':') || !std::getline(ss, k))
      throw UsageError("--grid log form is log:lo:hi:k");
    try {
      return log_grid(std::stod(lo), std::stod(hi), std::stoi(k));
    } catch (const std::invalid_argument&) {
      throw UsageError("--grid: bad number in '" + spec + "'");
    }
  }
  std::vector<double> out;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw UsageError("--grid: bad number '" + tok + "'");
    }
  }
  return out;
}

SolverConfig solver_config(const RunManifest& m) {
  SolverConfig c;
  c.dualGapTol = m.tol;
  c.maxSweeps = m.maxSweeps;
  c.verbose = m.verbose;
  return c;
}

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Parse, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json write_fit_outputs(const RunManifest& m, const Input& in, const FitResultd& f) {
  const fs::path dir(m.out);
  write_matrix_csv((dir / "Khat.csv").string(), f.Khat);
  write_matrix_csv((dir / "Sigma.csv").string(), f.SigmaHat);
  const GraphSpec edges = GraphSpec::support(f.Khat, 1e-6);
  write_edge_list((dir / "edges.txt").string(), edges);
  if (m.graphml) write_graphml((dir / "graph.graphml").string(), f.Khat, edges, in.names);
  const double nll = gaussian_neg_loglik(in.s, f.Khat);
  json summary = {
      {"d", in.s.rows()},
      {"dualGap", number(f.dualGap)},
      {"sweeps", f.sweeps},
      {"converged", f.converged},
      {"edgeCount", f.edge_count()},
      {"negLogLik", number(nll)},
      {"ebic", in.n > 0 ? number(ebic(in.s, f, in.n, m.gamma)) : json(nullptr)},
      {"gamma", m.gamma},
      {"n", in.n > 0 ? json(in.n) : json(nullptr)},
      {"isMMatrix", is_m_matrix(f.Khat, 1e-8)},
      {"start", to_string(f.start)},
      {"screenedRows", f.isolatedRows.size()},
      {"penaltyConvention", "sum over ordered pairs i != j (each edge counted twice)"},
  };
  write_json(dir / "summary.json", summary);
  return summary;
}

int cmd_fit(const RunManifest& m) {
  const Input in = load_input(m);
  const auto bounds = load_bounds(m, in.s.rows(), -1);
  try {
    const auto f = fit(in.s, bounds, solver_config(m));
    write_fit_outputs(m, in, f);
  } catch (const MaxSweepsError<double>& e) {
    write_fit_outputs(m, in, e.best());
    throw;
  }
  return kOk;
}

int cmd_path(const RunManifest& m) {
  const Input in = load_input(m);
  if (in.n < 1) throw UsageError("path needs the sample size: use data input or --n");
  const auto base = load_bounds(m, in.s.rows(), 1.0);
  EbicConfig cfg;
  cfg.gamma = m.gamma;
  cfg.n = in.n;
  cfg.grid = parse_grid(m.grid);
  const PathResult path = fit_path(in.s, base, cfg, solver_config(m), m.threads);

  std::optional<GraphSpec> truth;
  if (!m.truth.empty()) {
    require_file(m.truth, "--truth");
    truth = read_edge_list(m.truth, in.s.rows());
  }

  json points = json::array();
  for (size_t i = 0; i < path.grid.size(); ++i) {
    json p = {{"rho", path.grid[i]}, {"ok", path.fits[i].has_value()}};
    if (path.fits[i]) {
      p["ebic"] = number(path.ebicScores[i]);
      p["edgeCount"] = path.edgeCounts[i];
      p["dualGap"] = number(path.fits[i]->dualGap);
      p["sweeps"] = path.fits[i]->sweeps;
    } else {
      p["error"] = path.errors[i];
    }
    points.push_back(p);
  }
  json doc = {{"gamma", m.gamma},
              {"n", in.n},
              {"selectedIndex", path.selectedIndex},
              {"selectedRho", path.grid[path.selectedIndex]},
              {"points", points}};
  if (truth) {
    const GraphSpec est = GraphSpec::support(path.selected().Khat, 1e-6);
    size_t tp = 0, fp = 0;
    for (auto [i, j] : est.edges()) (truth->has_edge(i, j) ? tp : fp)++;
    const double dd = double(in.s.rows());
    const double nonEdges = dd * (dd - 1) / 2 - double(truth->edge_count());
    doc["truePositives"] = tp;
    doc["falsePositives"] = fp;
    doc["falsePositiveRate"] = nonEdges > 0 ? number(double(fp) / nonEdges) : json(nullptr);
    doc["truePositiveRate"] =
        truth->edge_count() ? number(double(tp) / double(truth->edge_count())) : json(nullptr);
  }
  write_json(fs::path(m.out) / "path.json", doc);
  write_fit_outputs(m, in, path.selected());
  return kOk;
}

int cmd_mde(const RunManifest& m) {
  if (m.graph.empty()) throw UsageError("mde needs --graph");
  const Input in = load_input(m);
  require_file(m.graph, "--graph");
  const GraphSpec g = read_edge_list(m.graph, in.s.rows());
  const MdeResult r = mde(in.s, g, solver_config(m));
  const fs::path dir(m.out);
  write_matrix_csv((dir / "SigmaCheck.csv").string(), r.SigmaCheck);
  write_matrix_csv((dir / "Kcheck.csv").string(), r.Kcheck);
  write_matrix_csv((dir / "Khat.csv").string(), r.Khat);
  const auto& c = r.conditions;
  json doc = {
      {"tolerance", 1e-7},
      {"satisfied", c.satisfied(1e-7)},
      {"max", c.max()},
      {"residuals",
       {{"i_edgeCovarianceNonnegative", c.edgeCovNonneg},
        {"ii_edgeCovarianceMatchesS", c.edgeCovMatch},
        {"iii_diagonalMatchesS", c.diagCovMatch},
        {"iv_offGraphPrecisionZero", c.offGraphZero},
        {"v_edgePrecisionOrdered", c.edgePrecisionOrder},
        {"vi_diagonalPrecisionEqual", c.diagPrecisionMatch},
        {"vii_complementarySlackness", c.slackness}}},
      {"isLocallyAssociated", is_locally_associated(r.SigmaCheck, g, 1e-7)},
      {"isMarkov", is_markov(r.Kcheck, g, 1e-7)},
      {"sweeps", {r.step1.sweeps, r.step2.sweeps}},
  };
  write_json(dir / "conditions.json", doc);
  return kOk;
}

int cmd_skeptic(const RunManifest& m) {
  require_file(m.input, "--input");
  const DataMatrix x = read_data_csv(m.input, m.header);
  if (x.n() < 2) throw UsageError("skeptic needs at least two observations");
  const SymMatrixd r = skeptic_correlation(x, m.tauB ? KendallVariant::TauB : KendallVariant::TauA);
  if (definiteness(r).status == DefinitenessStatus::Indefinite)
    std::cerr << "warning: rank correlation matrix is not positive semidefinite\n";
  write_matrix_csv((fs::path(m.out) / "R.csv").string(), r);
  return kOk;
}

int cmd_simulate(const RunManifest& m) {
  GraphSpec g;
  if (!m.graph.empty()) {
    if (m.dim < 1) throw UsageError("simulate needs --d with --graph");
    require_file(m.graph, "--graph");
    g = read_edge_list(m.graph, m.dim);
  } else {
    if (m.dim < 1) throw UsageError("simulate needs --d");
    g = GraphSpec::chain(m.dim);
  }
  if (m.rows < 1) throw UsageError("--rows must be positive");
  const SymMatrixd sigma = sample_locally_associated(g, m.seed);
  const DataMatrix x = sample_gaussian(sigma, m.rows, m.seed + 1);
  const fs::path dir(m.out);
  write_matrix_csv((dir / "data.csv").string(), x.values);
  write_matrix_csv((dir / "Sigma_true.csv").string(), sigma);
  write_edge_list((dir / "graph.txt").string(), g);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sign-aware penalized Gaussian precision matrix estimation"};
  app.require_subcommand(1);
  RunManifest m;

  auto addInput = [&](CLI::App* sub) {
    sub->add_option("--input", m.input, "Input CSV");
    sub->add_option("--input-kind", m.inputKind, "data | covariance | correlation")
        ->check(CLI::IsMember({"data", "covariance", "correlation"}));
    sub->add_flag("--header", m.header, "First CSV row holds column names");
    sub->add_flag("--standardize", m.standardize, "Fit the correlation matrix instead of S");
    sub->add_option("--n", m.n, "Sample size (for matrix inputs)");
  };
  auto addSolver = [&](CLI::App* sub) {
    sub->add_option("--tol", m.tol, "Duality gap tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-sweeps", m.maxSweeps, "Sweep budget")->check(CLI::PositiveNumber);
    sub->add_flag("--verbose", m.verbose, "Print the gap after each sweep");
  };
  auto addBounds = [&](CLI::App* sub) {
    sub->add_option("--preset", m.preset,
                    "glasso | asymmetric | positive | mtp2 | ggm | dual-positivity");
    sub->add_option("--rho", m.rho, "Penalty for glasso/positive")->check(CLI::NonNegativeNumber);
    sub->add_option("--rho-neg", m.rhoNeg, "Penalty on negative K_ij")->check(CLI::NonNegativeNumber);
    sub->add_option("--rho-pos", m.rhoPos, "Penalty on positive K_ij")->check(CLI::NonNegativeNumber);
    sub->add_option("--bounds-l", m.boundsL, "CSV of L (tokens inf/-inf allowed)");
    sub->add_option("--bounds-u", m.boundsU, "CSV of U (tokens inf/-inf allowed)");
    sub->add_option("--graph", m.graph, "Edge list, 1-based 'i j' per line");
  };
  auto addCommon = [&](CLI::App* sub) {
    sub->add_option("--out", m.out, "Output directory");
    sub->add_option("--seed", m.seed, "Random seed");
    sub->add_option("--gamma", m.gamma, "EBIC gamma in [0,1]")->check(CLI::Range(0.0, 1.0));
    sub->add_option("--threads", m.threads, "Worker threads")->check(CLI::PositiveNumber);
    sub->add_flag("--graphml", m.graphml, "Also write graph.graphml");
  };

  auto* fitCmd = app.add_subcommand("fit", "Fit one penalized estimate");
  addInput(fitCmd), addSolver(fitCmd), addBounds(fitCmd), addCommon(fitCmd);

  auto* pathCmd = app.add_subcommand("path", "Fit a penalty path and select by EBIC");
  addInput(pathCmd), addSolver(pathCmd), addBounds(pathCmd), addCommon(pathCmd);
  pathCmd->add_option("--grid", m.grid, "Comma list or log:lo:hi:k (default log:0.01:1:20)");
  pathCmd->add_option("--truth", m.truth, "True edge list; reports edge error rates");

  auto* mdeCmd = app.add_subcommand("mde", "Mixed dual estimate under local association");
  addInput(mdeCmd), addSolver(mdeCmd), addCommon(mdeCmd);
  mdeCmd->add_option("--graph", m.graph, "Edge list, 1-based 'i j' per line");

  auto* skepticCmd = app.add_subcommand("skeptic", "Rank-based correlation matrix");
  skepticCmd->add_option("--input", m.input, "Data CSV");
  skepticCmd->add_option("--input-kind", m.inputKind, "must be data")->check(CLI::IsMember({"data"}));
  skepticCmd->add_flag("--header", m.header, "First CSV row holds column names");
  skepticCmd->add_flag("--tau-b", m.tauB, "Use tau-b tie correction");
  addCommon(skepticCmd);

  auto* simCmd = app.add_subcommand("simulate", "Sample data from a random locally associated model");
  simCmd->add_option("--d", m.dim, "Dimension");
  simCmd->add_option("--rows", m.rows, "Number of observations");
  simCmd->add_option("--graph", m.graph, "Edge list (default: chain)");
  addCommon(simCmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (!fs::exists(m.out)) fs::create_directories(m.out);
    if (*fitCmd) return cmd_fit(m);
    if (*pathCmd) return cmd_path(m);
    if (*mdeCmd) return cmd_mde(m);
    if (*skepticCmd) return cmd_skeptic(m);
    if (*simCmd) return cmd_simulate(m);
  } catch (const UsageError& e) {
    std::cerr << "UsageError: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    std::cerr << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "Error: " << e.what() << '\n';
    return kOther;
  }
  return kOther;
}
