#include <benchmark/benchmark.h>

#include "chargegrid/lemmas.hpp"
#include "chargegrid/oracle.hpp"
#include "chargegrid/policy.hpp"

using namespace chargegrid;

namespace {

void BM_AdaptiveSimpson(benchmark::State& state) {
  analytic::QuadratureConfig cfg;
  for (auto _ : state) {
    const double v = analytic::integrate([](double x) { return std::exp(-0.01 * x) * std::sin(x / 50); },
                                         0.0, 5000.0, cfg);
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_AdaptiveSimpson);

void BM_CdfDn(benchmark::State& state) {
  const double x = static_cast<double>(state.range(0));
  for (auto _ : state) {
    const auto br = analytic::cdf_dn({{0.016, 0.2}, 2000, 3000, x});
    benchmark::DoNotOptimize(br.total);
  }
}
BENCHMARK(BM_CdfDn)->Arg(250)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_CdfDnPublished(benchmark::State& state) {
  for (auto _ : state) {
    const auto br = analytic::cdf_dn({{0.016, 0.2}, 2000, 3000, 1000}, {},
                                     analytic::Formulation::Published);
    benchmark::DoNotOptimize(br.total);
  }
}
BENCHMARK(BM_CdfDnPublished)->Unit(benchmark::kMillisecond);

void BM_ProbTc(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(analytic::prob_tc({0.011, 0.1}, 2000, 3000));
}
BENCHMARK(BM_ProbTc);

void BM_SimulateTrips(benchmark::State& state) {
  const std::vector<double> xs{100, 500, 1000, 2000, 5000};
  policy::RunOptions opts;
  std::uint64_t seed = 1;
  for (auto _ : state) {
    opts.seed = seed++;
    const auto s = policy::simulate_trips({0.016, 0.2}, 2000, 3000, xs, 10000, opts);
    benchmark::DoNotOptimize(s.passes);
  }
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_SimulateTrips)->Unit(benchmark::kMillisecond);

void BM_BestRoute(benchmark::State& state) {
  const int margin = static_cast<int>(state.range(0));
  SpanPolicy span;
  span.margin_roads = margin;
  const auto r = policy::sample_trip_realization({0.01, 0.3}, 500, 500, span, 3, 0);
  const auto g = oracle::build_grid(r, margin);
  for (auto _ : state) {
    const auto route = oracle::best_route(g);
    benchmark::DoNotOptimize(route.length);
  }
  state.counters["nodes"] = static_cast<double>(g.nodes.size());
}
BENCHMARK(BM_BestRoute)->Arg(1)->Arg(3);

}  // namespace

BENCHMARK_MAIN();
