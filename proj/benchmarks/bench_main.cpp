#include <benchmark/benchmark.h>

#include <fraclab/analysis.hpp>

using namespace fraclab;

namespace {

const Domain1D kInterval = Domain1D::make({{-1, 1}});

void BM_AssembleStiffness(benchmark::State& state) {
  const Mesh1D m = Mesh1D::make(kInterval, static_cast<int>(state.range(0)), 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(assemble_gagliardo(m, 0.5));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AssembleStiffness)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond)->Complexity();

void BM_AssembleDeformation(benchmark::State& state) {
  const Mesh1D m = Mesh1D::make(kInterval, static_cast<int>(state.range(0)), 2.0);
  const VectorField X = VectorField::make(1, {Expression::parse("x + 0.25*x^2")}, Box{{{-2, 2}}});
  for (auto _ : state) benchmark::DoNotOptimize(assemble_deformation(m, X, 0.5));
}
BENCHMARK(BM_AssembleDeformation)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_SolveEigen(benchmark::State& state) {
  const Mesh1D m = Mesh1D::make(kInterval, static_cast<int>(state.range(0)), 2.0);
  const AssembledForms f = assemble_forms(m, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(solve_geig(f.stiffness, f.mass, 4));
}
BENCHMARK(BM_SolveEigen)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_SolveEigenEven(benchmark::State& state) {
  const Mesh1D m = Mesh1D::make(kInterval, static_cast<int>(state.range(0)), 2.0);
  const AssembledForms f = assemble_forms(m, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(solve_geig_even(m, f.stiffness, f.mass, 4));
}
BENCHMARK(BM_SolveEigenEven)->RangeMultiplier(2)->Range(64, 512)->Unit(benchmark::kMillisecond);

void BM_Semilinear(benchmark::State& state) {
  const Mesh1D m = Mesh1D::make(kInterval, static_cast<int>(state.range(0)), 2.0);
  const AssembledForms f = assemble_forms(m, 0.75);
  for (auto _ : state) benchmark::DoNotOptimize(solve_semilinear(f, 4.0));
}
BENCHMARK(BM_Semilinear)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_PointwiseFracLap(benchmark::State& state) {
  auto phi = [](double x) {
    const double w = 1 - 4 * x * x;
    return w > 0 ? w * w * w : 0.0;
  };
  FracLapOptions opt;
  opt.support = Interval{-0.5, 0.5};
  opt.R = 1.0;
  opt.panel = 1.0;
  opt.tol = 1e-9;
  for (auto _ : state) benchmark::DoNotOptimize(frac_laplacian_pointwise(phi, 0.75, 0.1, opt));
}
BENCHMARK(BM_PointwiseFracLap)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
