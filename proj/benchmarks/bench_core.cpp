#include <benchmark/benchmark.h>

#include <random>

#include "noncollapse/flow.hpp"
#include "noncollapse/geometry.hpp"
#include "noncollapse/monitor.hpp"
#include "noncollapse/oracle.hpp"
#include "noncollapse/speed.hpp"

using namespace noncollapse;

namespace {

const char* const kSpeeds[] = {"mean", "harmonic", "power:0.5", "sigma-ratio:2", "sigma-root:2"};

void SpeedJet(benchmark::State& state) {
  const SpeedFunction f = SpeedFunction::parse(kSpeeds[state.range(0)], static_cast<int>(state.range(1)));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  Vec z(f.dimension());
  for (int i = 0; i < z.size(); ++i) z(i) = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(f.jet(z));
  state.SetLabel(f.name());
}
BENCHMARK(SpeedJet)->ArgsProduct({{0, 1, 2, 3, 4}, {2, 5}});

void SpeedValue(benchmark::State& state) {
  const SpeedFunction f = SpeedFunction::parse(kSpeeds[state.range(0)], 2);
  const double z[] = {0.7, 2.3};
  for (auto _ : state) benchmark::DoNotOptimize(f.value(z));
  state.SetLabel(f.name());
}
BENCHMARK(SpeedValue)->DenseRange(0, 4);

void InteriorGap(benchmark::State& state) {
  const SpeedFunction f = SpeedFunction::harmonic_mean(static_cast<int>(state.range(0)));
  std::uint64_t trial = 0;
  for (auto _ : state) {
    const InteriorSample s = sample_interior(f.dimension(), 1, trial++);
    benchmark::DoNotOptimize(interior_gap(f, s));
  }
}
BENCHMARK(InteriorGap)->Arg(2)->Arg(3)->Arg(5);

void FlowStep(benchmark::State& state) {
  const bool curve = state.range(0) == 0;
  const int n = static_cast<int>(state.range(1));
  const ConvexBody b = curve ? ellipse(n, 1.0, 1.5) : ellipsoid(n, 1.0, 1.5);
  const SpeedFunction f = flow_speed("harmonic", b.mode());
  const double dt = stable_dt(b, f, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(step(b, f, dt));
}
BENCHMARK(FlowStep)->ArgsProduct({{0, 1}, {64, 128, 256}})->Unit(benchmark::kMicrosecond);

void BallField(benchmark::State& state) {
  const bool curve = state.range(0) == 0;
  const int n = static_cast<int>(state.range(1));
  const ConvexBody b = curve ? ellipse(n, 1.0, 1.5) : ellipsoid(n, 1.0, 1.5);
  const FieldOptions options{.polish = state.range(2) != 0};
  for (auto _ : state) benchmark::DoNotOptimize(ball_curvature_field(b, options));
}
BENCHMARK(BallField)->ArgsProduct({{0, 1}, {64, 128}, {0, 1}})->Unit(benchmark::kMillisecond);

void Observe(benchmark::State& state) {
  const ConvexBody b = ellipsoid(static_cast<int>(state.range(0)), 1.0, 1.5);
  const SpeedFunction f = flow_speed("harmonic", b.mode());
  for (auto _ : state) benchmark::DoNotOptimize(observe(b, f));
}
BENCHMARK(Observe)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
