#include <random>

#include <benchmark/benchmark.h>

#include "dpbc/dp_oracle.hpp"
#include "dpbc/model_io.hpp"
#include "dpbc/monte_carlo.hpp"
#include "dpbc/noise.hpp"
#include "dpbc/sdp_problem.hpp"
#include "dpbc/sdp_solver.hpp"
#include "dpbc/sos_program.hpp"
#include "dpbc/synthesis.hpp"

using namespace dpbc;

namespace {

Polynomial dense_poly(const VarSpace& sp, int degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Polynomial p(sp);
  for (const Monomial& m : monomials_up_to_degree(sp.size(), degree)) p = p + Polynomial::monomial(sp, m, u(rng));
  return p;
}

void BM_PolyMul(benchmark::State& state) {
  const VarSpace sp(2, 1);
  const int d = static_cast<int>(state.range(0));
  const Polynomial a = dense_poly(sp, d, 1), b = dense_poly(sp, d, 2);
  for (auto _ : state) benchmark::DoNotOptimize(a * b);
}
BENCHMARK(BM_PolyMul)->Arg(2)->Arg(4)->Arg(6);

void BM_ExpectCompose(benchmark::State& state) {
  const SystemModel m = example1_model();
  const Polynomial v = dense_poly(m.space, static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(expect(v.compose(m.dynamics), m.noise));
}
BENCHMARK(BM_ExpectCompose)->Arg(6)->Arg(14);

void BM_BellmanStep(benchmark::State& state) {
  const SystemModel m = example1_model();
  const GridSpec g = default_grid(m);
  const BellmanOperator op(m, g, Task::Safety);
  ValueTable v = op.terminal(m.horizon);
  for (auto _ : state) {
    v = op.apply(v);
    benchmark::DoNotOptimize(v.values.data());
  }
}
BENCHMARK(BM_BellmanStep)->Unit(benchmark::kMicrosecond);

void BM_SolveDp(benchmark::State& state) {
  const SystemModel m = example1_model();
  const GridSpec g = default_grid(m);
  for (auto _ : state) benchmark::DoNotOptimize(solve_dp(m, g, Task::Safety));
}
BENCHMARK(BM_SolveDp)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
  const SystemModel m = example1_model();
  const double x0[] = {-0.9};
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo(m, x0, Task::Safety, 100000, 7));
}
BENCHMARK(BM_MonteCarlo)->Unit(benchmark::kMillisecond);

void BM_IpmDsbc(benchmark::State& state) {
  SosDegrees deg;
  deg.certificate = static_cast<int>(state.range(0));
  const SdpProblem p = compile(build_dsbc(example1_model(), 1.0, deg)).sdp;
  const InteriorPointSolver ipm;
  for (auto _ : state) benchmark::DoNotOptimize(ipm.solve(p));
}
BENCHMARK(BM_IpmDsbc)->Arg(6)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_Synthesize(benchmark::State& state) {
  const SystemModel m = example1_model();
  SynthesisOptions o;
  o.degrees.certificate = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(synthesize(m, CertificateKind::RABC, 1.06, o));
}
BENCHMARK(BM_Synthesize)->Arg(6)->Arg(14)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
