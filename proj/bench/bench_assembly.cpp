// Serial against OpenMP assembly of the Koiter surface operators and the
// scaled 3D system on the elliptic case geometry.

#include <benchmark/benchmark.h>

#include "koiter/experiments.hpp"

using namespace koiter;

namespace {

AssemblyMode mode_of(const benchmark::State& s) {
  return s.range(0) ? AssemblyMode::Parallel : AssemblyMode::Serial;
}

void BM_SurfaceOperators(benchmark::State& state) {
  const ShellCase c = builtin_case("elliptic");
  const auto chart = c.make_chart();
  const int n = static_cast<int>(state.range(1));
  const auto mesh = std::make_shared<const TriMesh>(structured_tri(c.rect, n, n, c.boundary));
  const auto tang = FunctionSpace::lagrange_tri(mesh, c.tangential_order);
  const MixedSpace layout({tang, tang, FunctionSpace::reduced_hct(mesh)});
  for (auto _ : state) {
    auto ops = assemble_surface_operators(*chart, c.lame, layout, c.quad, true, mode_of(state));
    benchmark::DoNotOptimize(ops.M.nonZeros());
  }
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}

void BM_ThreeD(benchmark::State& state) {
  const ShellCase c = builtin_case("elliptic");
  const auto chart = c.make_chart();
  const int n = static_cast<int>(state.range(1));
  const double eps = 1e-2;
  const auto prism = std::make_shared<const PrismMesh>(extrude(structured_tri(c.rect, n, n, c.boundary), 4));
  const auto space = FunctionSpace::lagrange_prism(prism, c.prism_order, ThicknessBasis::ScaledHierarchical, eps);
  MixedSpace layout({space, space, space});
  for (int i = 0; i < 3; ++i) layout.clamp(i, c.boundary);
  const ShellLoad load = physical_load(c, eps);
  for (auto _ : state) {
    auto sys = assemble_3d_scaled(*chart, c.lame, eps, load, layout, c.quad, mode_of(state));
    benchmark::DoNotOptimize(sys.matrix.nonZeros());
  }
  state.SetLabel(state.range(0) ? "parallel" : "serial");
}

}  // namespace

BENCHMARK(BM_SurfaceOperators)->ArgsProduct({{0, 1}, {16, 32}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ThreeD)->ArgsProduct({{0, 1}, {8, 16}})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
