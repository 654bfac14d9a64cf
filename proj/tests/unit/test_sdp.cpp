#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "dpbc/error.hpp"
#include "dpbc/model_io.hpp"
#include "dpbc/sdp_problem.hpp"
#include "dpbc/sdp_solver.hpp"
#include "dpbc/sdpa_io.hpp"
#include "dpbc/sos_program.hpp"

using namespace dpbc;

namespace {

// minimize t  s.t.  t - s = 1, s >= 0 (1x1 block), t free.
SdpProblem shifted_scalar() {
  SdpProblem p;
  p.block_sizes = {1};
  p.block_labels = {"s"};
  p.num_free = 1;
  p.free_labels = {"t"};
  p.num_rows = 1;
  p.rhs = {1.0};
  p.constraint_entries = {{SymEntry{0, 0, 0, -1.0}}};
  p.free_entries = {FreeEntry{0, 0, 1.0}};
  p.objective_entries = {{}};
  p.free_objective = {1.0};
  return p;
}

// Gram feasibility for a0 + a1 x + a2 x^2 over the basis (1, x).
SdpProblem univariate_gram(double a0, double a1, double a2) {
  SdpProblem p;
  p.block_sizes = {2};
  p.block_labels = {"Q"};
  p.num_rows = 3;
  p.rhs = {a0, a1, a2};
  p.constraint_entries = {{SymEntry{0, 0, 0, 1.0}, SymEntry{1, 0, 1, 1.0}, SymEntry{2, 1, 1, 1.0}}};
  p.objective_entries = {{}};
  return p;
}

// minimize <C, X> s.t. tr X = 1, whose value is lambda_min(C).
SdpProblem min_eigenvalue_problem(const Eigen::MatrixXd& C) {
  const int n = static_cast<int>(C.rows());
  SdpProblem p;
  p.block_sizes = {n};
  p.block_labels = {"X"};
  p.num_rows = 1;
  p.rhs = {1.0};
  p.constraint_entries.resize(1);
  p.objective_entries.resize(1);
  for (int i = 0; i < n; ++i) {
    p.constraint_entries[0].push_back(SymEntry{0, i, i, 1.0});
    for (int j = i; j < n; ++j) p.objective_entries[0].push_back(SymEntry{0, i, j, C(i, j)});
  }
  return p;
}

std::string run_command(const std::string& cmd, int& status) {
  std::string out;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) {
    status = -1;
    return out;
  }
  char buf[256];
  while (fgets(buf, sizeof buf, f)) out += buf;
  status = pclose(f);
  return out;
}

}  // namespace

TEST_CASE("IPM: scalar problem with a free variable") {
  const SdpSolution s = InteriorPointSolver().solve(shifted_scalar());
  REQUIRE(s.status == SdpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.u[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(s.primal_residual < 1e-8);
}

TEST_CASE("IPM: Gram feasibility of x^2 + 2x + 1 and infeasibility of x") {
  const SdpSolution ok = InteriorPointSolver().solve(univariate_gram(1.0, 2.0, 1.0));
  REQUIRE(ok.status == SdpStatus::Optimal);
  CHECK(ok.X[0](0, 1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(ok.X[0]).eigenvalues().minCoeff() >= -1e-8);

  const SdpSolution bad = InteriorPointSolver().solve(univariate_gram(0.0, 1.0, 0.0));
  CHECK(bad.status == SdpStatus::Infeasible);
}

TEST_CASE("IPM agrees with an eigenvalue oracle") {
  std::mt19937_64 rng(67);
  std::normal_distribution<double> n01;
  for (int n : {2, 3, 5, 8}) {
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = n01(rng);
    const Eigen::MatrixXd C = (A + A.transpose()) / 2.0;
    const double lmin = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(C).eigenvalues().minCoeff();
    const SdpSolution s = InteriorPointSolver().solve(min_eigenvalue_problem(C));
    REQUIRE(s.status == SdpStatus::Optimal);
    CAPTURE(n);
    CHECK(s.objective == doctest::Approx(lmin).epsilon(1e-6).scale(1.0));
    CHECK(s.gap < 1e-7);
  }
}

TEST_CASE("maximisation and the objective constant") {
  SdpProblem p = shifted_scalar();
  // maximize -t + 3 stored as minimize t - 3
  p.sense = Sense::Maximize;
  p.objective_constant = -3.0;
  const SdpSolution s = InteriorPointSolver().solve(p);
  REQUIRE(s.status == SdpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(2.0).epsilon(1e-7));
}

TEST_CASE("compile: Gram block sizes and constraint groups") {
  const SystemModel m = example1_model();
  CHECK(gram_basis(m.space, 6).size() == 4);
  SosDegrees deg;
  deg.certificate = 6;
  const SosProgram prog = build_dsbc(m, 1.0, deg);
  CHECK(prog.constraint_groups() == 6);
  const CompiledSos c = compile(prog);
  c.sdp.validate();
  int four = 0;
  for (int b = 0; b < c.sdp.num_blocks(); ++b) four += c.sdp.block_sizes[b] == 4;
  CHECK(four >= 3);
  for (int b : c.layout.constraint_block) CHECK(c.sdp.block_sizes[b] >= 1);
  CHECK(c.layout.constraint_block.size() == prog.constraints.size());
  CHECK(c.layout.multiplier_block.size() == prog.multipliers.size());
  CHECK(c.layout.inequality_block.size() == prog.inequalities.size());
  CHECK(c.sdp.num_free == prog.decision_count());
}

TEST_CASE("apply_constraints reproduces the right-hand side at the IPM solution") {
  SosDegrees deg;
  deg.certificate = 4;
  const CompiledSos c = compile(build_dsbc(example2_model(), 1.0, deg));
  const SdpSolution s = InteriorPointSolver().solve(c.sdp);
  REQUIRE(s.status == SdpStatus::Optimal);
  const Eigen::VectorXd lhs = apply_constraints(c.sdp, s.X, s.u);
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(c.sdp.rhs.data(), c.sdp.num_rows);
  CHECK((lhs - rhs).norm() / (1.0 + rhs.norm()) < 1e-8);
  for (const auto& X : s.X) CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(X).eigenvalues().minCoeff() >= -1e-8);
}

TEST_CASE("gram_polynomial") {
  const VarSpace sp(1, 1);
  const std::vector<Monomial> basis = gram_basis(sp, 2);
  REQUIRE(basis.size() == 2);
  Eigen::MatrixXd Q(2, 2);
  Q << 1, 1, 1, 1;
  const Polynomial x = Polynomial::variable(sp, 0);
  CHECK((gram_polynomial(sp, basis, Q) - (x * x + x * 2.0 + 1.0)).pruned(1e-14).is_zero());
}

TEST_CASE("SDPA export round trip") {
  SosDegrees deg;
  deg.certificate = 6;
  for (const SdpProblem& p : {compile(build_dsbc(example1_model(), 1.002, deg)).sdp,
                              compile(build_rabc(example1_model(), 1.06, deg)).sdp, shifted_scalar(),
                              univariate_gram(1.0, 2.0, 1.0)}) {
    std::stringstream ss;
    write_sdpa(p, ss);
    const SdpProblem back = read_sdpa(ss);
    CHECK(back.same_data(p));
  }
  SdpProblem empty;
  std::stringstream ss;
  write_sdpa(empty, ss);
  CHECK(read_sdpa(ss).same_data(empty));

  std::stringstream garbage("3\n1\n2\n1 2\n");
  CHECK_THROWS_AS(read_sdpa(garbage), InvalidInputError);
  CHECK_THROWS_AS(read_sdpa_file("/nonexistent/file.dat-s"), Error);
}

TEST_CASE("sdpa-export backend writes the file and reports NotSolved") {
  const auto path = std::filesystem::temp_directory_path() / "dpbc_test_export.dat-s";
  const auto backend = make_backend("sdpa-export", {}, path.string());
  const SdpSolution s = backend->solve(shifted_scalar());
  CHECK(s.status == SdpStatus::NotSolved);
  CHECK(read_sdpa_file(path.string()).same_data(shifted_scalar()));
  std::filesystem::remove(path);
  CHECK_THROWS_AS(make_backend("mosek"), ConfigError);
}

TEST_CASE("exported Example 1 DSBC program: IPM agrees with an external conic solver") {
  const std::string python = DPBC_PYTHON;
  if (python.empty()) {
    MESSAGE("python interpreter not found; cross-solver check skipped");
    return;
  }
  int status = 0;
  run_command(python + " -c 'import cvxpy' 2>/dev/null", status);
  if (status != 0) {
    MESSAGE("cvxpy not importable; cross-solver check skipped");
    return;
  }
  SosDegrees deg;
  deg.certificate = 6;
  const SdpProblem p = compile(build_dsbc(example1_model(), 1.002, deg)).sdp;
  const auto path = std::filesystem::temp_directory_path() / "dpbc_test_cross.dat-s";
  write_sdpa(p, path.string());
  const std::string out =
      run_command(python + " " + DPBC_SCRIPT_DIR + "/solve_sdpa.py " + path.string() + " CLARABEL", status);
  std::filesystem::remove(path);
  REQUIRE(status == 0);
  std::istringstream in(out);
  std::string key, word;
  double external = NAN;
  while (in >> key >> word) {
    if (key == "status") CHECK(word == "optimal");
    if (key == "objective") external = std::stod(word);
  }
  REQUIRE(std::isfinite(external));
  const SdpSolution s = InteriorPointSolver().solve(p);
  REQUIRE(s.status == SdpStatus::Optimal);
  CHECK(std::abs(s.primal_objective - external) <= 1e-4);
}
