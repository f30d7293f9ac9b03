#include <benchmark/benchmark.h>

#include <memory>

#include "ibpf/closedform.hpp"
#include "ibpf/direction.hpp"
#include "ibpf/functionals.hpp"
#include "ibpf/paths.hpp"
#include "ibpf/rng.hpp"
#include "ibpf/special.hpp"
#include "ibpf/verify.hpp"

using namespace ibpf;

static void BM_BridgeSweep(benchmark::State& st) {
  auto grid = std::make_shared<const TimeGrid>(TimeGrid::uniform(static_cast<std::size_t>(st.range(0))));
  PathSampler s(grid);
  RngStream rng(1);
  std::vector<double> buf(grid->size());
  for (auto _ : st) {
    s.bridge(1.5, buf, rng);
    benchmark::DoNotOptimize(buf.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_BridgeSweep)->Arg(257)->Arg(1025);

static void BM_PinnedSweep(benchmark::State& st) {
  auto grid = std::make_shared<const TimeGrid>(TimeGrid::uniform_with_pin(257, 0.3));
  PathSampler s(grid);
  RngStream rng(2);
  std::vector<double> buf(grid->size());
  for (auto _ : st) {
    s.pinned_bridge(0.7, 0.4, buf, rng);
    benchmark::DoNotOptimize(buf.data());
  }
}
BENCHMARK(BM_PinnedSweep);

static void BM_NoncentralChiSq(benchmark::State& st) {
  RngStream rng(3);
  const double nc = static_cast<double>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(special::sample_noncentral_chisq(0.01, nc, rng));
}
BENCHMARK(BM_NoncentralChiSq)->Arg(1)->Arg(100)->Arg(10000);

static void BM_Poisson(benchmark::State& st) {
  RngStream rng(4);
  const double mu = static_cast<double>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(rng.poisson(mu));
}
BENCHMARK(BM_Poisson)->Arg(5)->Arg(50)->Arg(5000);

static void BM_FShape(benchmark::State& st) {
  double u = 0.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(special::f_shape(u));
    u = u > 30.0 ? 0.0 : u + 0.37;
  }
}
BENCHMARK(BM_FShape);

static void BM_ClosedFormIdentity(benchmark::State& st) {
  auto phi = make_exp_quadratic(ThetaProfile::constant(1.0));
  auto h = default_direction();
  const double delta = static_cast<double>(st.range(0)) / 10.0;
  for (auto _ : st)
    benchmark::DoNotOptimize(verify::verify_identity(phi, h, verify::Regime::from_delta(delta), verify::ClosedFormMethod{}).gap);
}
BENCHMARK(BM_ClosedFormIdentity)->Arg(5)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_PinnedLaplace(benchmark::State& st) {
  ThetaProfile th({0.0, 0.3, 0.6, 1.0}, {1.0, 0.2, 2.0});
  double r = 0.01;
  for (auto _ : st) {
    benchmark::DoNotOptimize(closedform::pinned_parts(1.5, th, r).C);
    r = r > 0.98 ? 0.01 : r + 0.013;
  }
}
BENCHMARK(BM_PinnedLaplace);

BENCHMARK_MAIN();
