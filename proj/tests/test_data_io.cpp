#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "golazo/data_io.hpp"
#include "golazo/estimators.hpp"
#include "test_support.hpp"

using namespace golazo;
using Eigen::MatrixXd;
namespace fs = std::filesystem;

namespace {

DataMatrix data(const MatrixXd& v) { return DataMatrix{v, {}}; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "golazo_unit";
  fs::create_directories(dir);
  return dir / name;
}

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("sample_covariance examples") {
  CHECK(sample_covariance(data(MatrixXd::Identity(2, 2)), false) == 0.5 * MatrixXd::Identity(2, 2));
  MatrixXd row(1, 2);
  row << 3, -2;
  MatrixXd rank1(2, 2);
  rank1 << 9, -6, -6, 4;
  CHECK(sample_covariance(data(row), false) == rank1);
  MatrixXd c(3, 2);
  c << 1, 5, 2, 5, 3, 5;
  const auto flagged = constant_columns(data(c), true);
  REQUIRE(flagged.size() == 1);
  CHECK(flagged[0] == 1);
}

TEST_CASE("to_correlation examples") {
  MatrixXd d(2, 2);
  d << 4, 0, 0, 9;
  CHECK(to_correlation(d) == MatrixXd::Identity(2, 2));
  MatrixXd p(2, 2);
  p << 4, 2, 2, 1;
  CHECK(to_correlation(p) == MatrixXd::Ones(2, 2));
  MatrixXd r(2, 2);
  r << 1, .5, .5, 1;
  CHECK(to_correlation(r) == r);
}

TEST_CASE("kendall tau and SKEPTIC") {
  Eigen::VectorXd a(5), b(5), alt(4), base(4);
  a << 1, 2, 3, 4, 5;
  b << 2, 4, 6, 8, 10;
  CHECK(kendall_tau(a, b) == 1.0);
  base << 1, 2, 3, 4;
  alt << 1, -1, -1, 1;  // concordant 2, discordant 2
  CHECK(kendall_tau(base, alt) == 0.0);

  MatrixXd x(5, 3);
  x.col(0) = a;
  x.col(1) = b;
  x.col(2).setConstant(7.0);
  const auto r = skeptic_correlation(data(x));
  CHECK(r(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(r(0, 2) == 0.0);
  CHECK(r(1, 2) == 0.0);
  CHECK(std::sin(std::numbers::pi / 2 * 0.5) == doctest::Approx(std::sqrt(2.0) / 2));

  CHECK_THROWS_AS(skeptic_correlation(data(MatrixXd::Ones(1, 3))), Error);

  // tau-b discounts ties
  Eigen::VectorXd t1(4), t2(4);
  t1 << 1, 1, 2, 3;
  t2 << 1, 2, 3, 4;
  CHECK(kendall_tau(t1, t2, KendallVariant::TauA) == doctest::Approx(5.0 / 6.0));
  CHECK(kendall_tau(t1, t2, KendallVariant::TauB) == doctest::Approx(5.0 / std::sqrt(30.0)));
}

TEST_CASE("property: SKEPTIC entries are bounded and symmetric") {
  std::mt19937_64 rng(71);
  std::normal_distribution<double> normal;
  for (int rep = 0; rep < 20; ++rep) {
    MatrixXd x(10 + rep, 4);
    for (Index i = 0; i < x.rows(); ++i)
      for (Index j = 0; j < 4; ++j) x(i, j) = std::round(3 * normal(rng));
    const auto r = skeptic_correlation(data(x));
    CHECK(r.cwiseAbs().maxCoeff() <= 1.0);
    CHECK(r == r.transpose());
    CHECK(r.diagonal() == Eigen::VectorXd::Ones(4));
  }
}

TEST_CASE("nearest_correlation repairs an indefinite matrix") {
  MatrixXd r(3, 3);
  r << 1, 0.9, -0.9, 0.9, 1, 0.9, -0.9, 0.9, 1;
  REQUIRE_FALSE(is_positive_definite(r));
  const auto c = nearest_correlation(r);
  CHECK(is_positive_definite(c));
  CHECK((c.diagonal().array() == 1.0).all());
}

TEST_CASE("dag_covariance examples") {
  DagSpec empty;
  empty.d = 3;
  empty.order = {0, 1, 2};
  empty.noiseVars = Eigen::Vector3d(1, 2, 3);
  CHECK(dag_covariance(empty) == MatrixXd(empty.noiseVars.asDiagonal()));

  DagSpec chain;
  chain.d = 2;
  chain.order = {0, 1};
  chain.edges = {{1, 0, 0.5}};
  chain.noiseVars = Eigen::Vector2d(1, 1);
  MatrixXd expected(2, 2);
  expected << 1, 0.5, 0.5, 1.25;
  CHECK((dag_covariance(chain) - expected).cwiseAbs().maxCoeff() < 1e-15);

  DagSpec bad = chain;
  bad.edges = {{1, 0, -0.5}};
  try {
    sample_positive_dag(bad, 10, 1);
    FAIL("expected NegativeLoadingInPositiveMode");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NegativeLoadingInPositiveMode);
  }
  CHECK_NOTHROW(sample_positive_dag(bad, 10, 1, false));
}

TEST_CASE("property: nonnegative loadings give nonnegative covariances") {
  auto rng = make_rng(72);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 50; ++rep) {
    DagSpec s;
    s.d = 5;
    s.order = {0, 1, 2, 3, 4};
    s.noiseVars = Eigen::VectorXd::Constant(5, 1.0);
    for (Index c = 1; c < 5; ++c)
      for (Index p = 0; p < c; ++p)
        if (u(rng) < 0.5) s.edges.push_back({c, p, u(rng)});
    CHECK((dag_covariance(s).array() >= 0).all());
  }
}

TEST_CASE("property: ancestral sampling matches the DAG covariance") {
  DagSpec s;
  s.d = 3;
  s.order = {0, 1, 2};
  s.edges = {{1, 0, 0.6}, {2, 1, 0.4}, {2, 0, 0.3}};
  s.noiseVars = Eigen::Vector3d(1.0, 0.5, 0.8);
  const Index n = 20000;
  const auto x = sample_positive_dag(s, n, 2024);
  const MatrixXd emp = sample_covariance(x, false);
  const MatrixXd sigma = dag_covariance(s);
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j) {
      // Var(X_i X_j) = Sigma_ii Sigma_jj + Sigma_ij^2 for centered Gaussians
      const double se = std::sqrt((sigma(i, i) * sigma(j, j) + sigma(i, j) * sigma(i, j)) / double(n));
      CHECK(std::abs(emp(i, j) - sigma(i, j)) < 3 * se);
    }
}

TEST_CASE("locally associated generator") {
  const auto diag = sample_locally_associated(GraphSpec(4), 3);
  CHECK(diag.isDiagonal());
  CHECK((diag.diagonal().array() > 0).all());

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const GraphSpec g = seed % 2 ? GraphSpec::chain(3) : GraphSpec::cycle(4);
    const auto sigma = sample_locally_associated(g, seed);
    CHECK(is_locally_associated(sigma, g, 0.0));
    CHECK(is_markov(invert_pd(sigma), g, 1e-10));
  }
}

TEST_CASE("streams are reproducible and distinct") {
  auto a = make_rng(5, 0), b = make_rng(5, 0), c = make_rng(5, 1);
  const auto x = a(), y = b(), z = c();
  CHECK(x == y);
  CHECK(x != z);
}

TEST_CASE("CSV round trip") {
  const MatrixXd m = (MatrixXd(2, 2) << 1.0 / 3.0, -2.5e-17, -2.5e-17, 7).finished();
  const auto p = scratch("m.csv");
  write_matrix_csv(p.string(), m);
  CHECK(read_matrix_csv(p.string(), false) == m);

  write_text(scratch("h.csv"), "a,b\n1,2\n3,4\n5,6\n");
  const auto d = read_data_csv(scratch("h.csv").string(), true);
  CHECK(d.n() == 3);
  CHECK(d.columnNames == std::vector<std::string>{"a", "b"});
  CHECK(d.values(2, 1) == 6.0);

  write_text(scratch("asym.csv"), "1,0.5\n0.4,1\n");
  CHECK_THROWS_AS(read_matrix_csv(scratch("asym.csv").string(), false), Error);
  write_text(scratch("bad.csv"), "1,x\n0,1\n");
  CHECK_THROWS_AS(read_matrix_csv(scratch("bad.csv").string(), false), Error);

  write_text(scratch("L.csv"), "0,-inf\n-inf,0\n");
  write_text(scratch("U.csv"), "0,inf\ninf,0\n");
  const auto b = read_bounds_csv(scratch("L.csv").string(), scratch("U.csv").string());
  CHECK(b.L(0, 1) == -infinity<double>());
  CHECK(b.U(1, 0) == infinity<double>());
}

TEST_CASE("edge lists") {
  write_text(scratch("g.txt"), "# chain\n1 2\n\n2 3  # second\n");
  const auto g = read_edge_list(scratch("g.txt").string(), 3);
  CHECK(g == GraphSpec::chain(3));
  write_edge_list(scratch("g2.txt").string(), g);
  CHECK(read_edge_list(scratch("g2.txt").string(), 3) == g);
  write_text(scratch("bad.txt"), "1 4\n");
  CHECK_THROWS_AS(read_edge_list(scratch("bad.txt").string(), 3), Error);

  MatrixXd k(3, 3);
  k << 2, -1, 0, -1, 2, -0.5, 0, -0.5, 1;
  write_graphml(scratch("g.graphml").string(), k, g, {"x<1>", "y", "z"});
  std::ifstream in(scratch("g.graphml"));
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text.find("x&lt;1&gt;") != std::string::npos);
  CHECK(text.find("<data key=\"pc\">0.5</data>") != std::string::npos);
}
