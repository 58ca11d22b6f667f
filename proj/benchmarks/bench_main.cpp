#include <vector>

#include <benchmark/benchmark.h>

#include <qcdist/cantor.hpp>
#include <qcdist/carleson.hpp>
#include <qcdist/dimension.hpp>

using namespace qcdist;

namespace {

void BM_PackDisks(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pack_disks(m));
}
BENCHMARK(BM_PackDisks)->Arg(7)->Arg(100)->Arg(1000);

void BM_SolveSigma(benchmark::State& state) {
  CantorTree tree(2.0, GaugeFunction(2.0 / 3.0, PowerLog{1.0}));
  const Packing p = pack_disks(50);
  for (auto _ : state) benchmark::DoNotOptimize(solve_sigma(tree, 1, 50, p.R));
}
BENCHMARK(BM_SolveSigma);

void BM_BuildRegular(benchmark::State& state) {
  const std::vector<int> ms(static_cast<std::size_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(build(2.0, GaugeFunction::power(2.0 / 3.0), ms));
}
BENCHMARK(BM_BuildRegular)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_ComposedMapEval(benchmark::State& state) {
  const std::vector<int> ms(5, 7);
  const BuildResult r = build(2.0, GaugeFunction::power(2.0 / 3.0), ms);
  const auto disks = r.tree.source_disks(5);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(r.map(disks[i].center));
    i = (i + 1) % disks.size();
  }
}
BENCHMARK(BM_ComposedMapEval);

void BM_BoxDimension(benchmark::State& state) {
  const std::vector<int> ms(6, 7);
  BuildOptions o;
  o.node_cap = 1;
  const BuildResult r = build(2.0, GaugeFunction::power(2.0 / 3.0), ms, o);
  const auto disks = r.tree.source_disks(6);
  BoxCountingOptions b;
  b.j_max = 14;
  for (auto _ : state) benchmark::DoNotOptimize(box_dimension(disks, b));
}
BENCHMARK(BM_BoxDimension)->Unit(benchmark::kMillisecond);

void BM_IntegralMeans(benchmark::State& state) {
  const double r = 1.0 - std::ldexp(1.0, -static_cast<int>(state.range(0)));
  const AnalyticTestMap f(maps::HalfPlanePower{2.0});
  for (auto _ : state) benchmark::DoNotOptimize(integral_means(f, 1.0, r));
}
BENCHMARK(BM_IntegralMeans)->Arg(6)->Arg(12)->Arg(16)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
