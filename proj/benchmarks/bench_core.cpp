#include <benchmark/benchmark.h>

#include "ek/evolution.hpp"
#include "ek/multisoliton.hpp"
#include "ek/stability.hpp"

using namespace ek;

namespace {

Stencil stencil_arg(int64_t k) { return static_cast<Stencil>(k); }

void BM_SolitonProfile(benchmark::State& st) {
  auto gp = gross_pitaevskii();
  for (auto _ : st) benchmark::DoNotOptimize(soliton_profile(gp, {1.0, 0.0}, 0.6, 0.0, static_cast<int>(st.range(0))));
}
BENCHMARK(BM_SolitonProfile)->Arg(1025)->Arg(4097)->Unit(benchmark::kMillisecond);

void BM_KinkProfile(benchmark::State& st) {
  auto cu = cubic_vdw();
  auto spec = solve_kink_endstates(cu, 0.0, {1.1, 2.9, 0.0});
  for (auto _ : st) benchmark::DoNotOptimize(kink_profile(cu, spec, 20.0, 4097));
}
BENCHMARK(BM_KinkProfile)->Unit(benchmark::kMillisecond);

void BM_RhsNonlinear(benchmark::State& st) {
  auto gp = gross_pitaevskii();
  Discretization d(gp, Grid::periodic(-40, 40, static_cast<int>(st.range(0))), stencil_arg(st.range(1)));
  FieldState s = sample_profile(soliton_profile(gp, {1.0, 0.0}, 0.6), d.grid());
  for (auto _ : st) benchmark::DoNotOptimize(rhs_nonlinear(d, s));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_RhsNonlinear)->ArgsProduct({{1024, 4096}, {0, 1, 2}});

void BM_StepNonlinear(benchmark::State& st) {
  auto gp = gross_pitaevskii();
  Discretization d(gp, Grid::periodic(-40, 40, 4096), Stencil::fd4);
  FieldState s = sample_profile(soliton_profile(gp, {1.0, 0.0}, 0.6), d.grid());
  const double dt = cfl_dt(d, s);
  const Scheme scheme = st.range(0) ? Scheme::rk4_gauge : Scheme::rk4_primitive;
  for (auto _ : st) benchmark::DoNotOptimize(step_nonlinear(d, s, dt, scheme));
}
BENCHMARK(BM_StepNonlinear)->Arg(0)->Arg(1);

void BM_StepLinearized(benchmark::State& st) {
  auto gp = gross_pitaevskii();
  auto p = soliton_profile(gp, {1.0, 0.0}, 0.6);
  Discretization d(gp, Grid::periodic(-40, 40, 512), Stencil::spectral);
  FieldState bg = discrete_traveling_wave(d, p);
  HessianCoefficients coef = hessian_coefficients(d, bg);
  FieldState u = translation_mode(d, bg);
  const double dt = 0.5 * cfl_dt(d, bg);
  for (auto _ : st) benchmark::DoNotOptimize(step_linearized(d, coef, u, dt, 0.6));
}
BENCHMARK(BM_StepLinearized);

void BM_AssembleAndSpectrum(benchmark::State& st) {
  auto gp = gross_pitaevskii();
  auto p = soliton_profile(gp, {1.0, 0.0}, 0.6);
  Discretization d(gp, Grid::periodic(-40, 40, static_cast<int>(st.range(0))), Stencil::fd2);
  for (auto _ : st) {
    Eigen::MatrixXd M = assemble_d2E(d, p);
    benchmark::DoNotOptimize(spectrum_d2E(M, d, gp, p, 0.0));
  }
}
BENCHMARK(BM_AssembleAndSpectrum)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_AssembleAnsatz(benchmark::State& st) {
  auto m = constant_k(3.0, Polynomial{{-1.0, 1.0}});
  auto cfg = make_config({soliton_profile(m, {1.0, 0.0}, 0.8), soliton_profile(m, {1.0, 0.0}, 0.9)}, 30.0, 0.0, 0.85);
  Grid g = Grid::periodic(-120, 150, 600);
  double t = 0.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(assemble_S(cfg, t, g));
    benchmark::DoNotOptimize(partition_of_unity(cfg, t, g));
    t += 0.01;
  }
}
BENCHMARK(BM_AssembleAnsatz);

}  // namespace

BENCHMARK_MAIN();
