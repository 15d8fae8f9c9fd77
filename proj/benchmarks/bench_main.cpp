#include <benchmark/benchmark.h>

#include <random>

#include "geoframe/geoframe.hpp"

namespace {

using namespace geoframe;

Multivector dense(std::mt19937& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Term> terms;
  for (unsigned m = 0; m < (1u << n); ++m) terms.push_back({static_cast<BladeMask>(m), u(rng)});
  return Multivector(n, std::move(terms));
}

void BM_GeometricProductDense(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937 rng(7);
  const Multivector a = dense(rng, n);
  const Multivector b = dense(rng, n);
  for (auto _ : state) benchmark::DoNotOptimize(geometric_product(a, b));
}
BENCHMARK(BM_GeometricProductDense)->DenseRange(2, 8, 2);

void BM_VectorWedge(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n), y(n);
  for (int k = 0; k < n; ++k) x[k] = u(rng), y[k] = u(rng);
  const Multivector a = Multivector::vector(x);
  const Multivector b = Multivector::vector(y);
  for (auto _ : state) benchmark::DoNotOptimize(outer_product(a, b));
}
BENCHMARK(BM_VectorWedge)->Arg(3)->Arg(6)->Arg(12);

PhasorSpec spec_for(std::size_t n) {
  std::vector<Phasor> ph;
  for (std::size_t k = 0; k < n; ++k) ph.push_back({1.0 + 0.1 * k, -0.7 * k});
  return PhasorSpec::from_frequency(50.0, ph);
}

void BM_IdentifyFrame(benchmark::State& state) {
  const PhasorSpec spec = spec_for(static_cast<std::size_t>(state.range(0)));
  const auto v1 = synthesize(spec, 0.0);
  const auto v2 = synthesize(spec, 0.004);
  for (auto _ : state) benchmark::DoNotOptimize(identify_frame(v1, v2));
}
BENCHMARK(BM_IdentifyFrame)->Arg(3)->Arg(6)->Arg(8);

void BM_TransformSample(benchmark::State& state) {
  const PhasorSpec spec = spec_for(static_cast<std::size_t>(state.range(0)));
  const FrameTransform f = identify_frame(synthesize(spec, 0.0), synthesize(spec, 0.004));
  const auto v = synthesize(spec, 0.0071);
  for (auto _ : state) benchmark::DoNotOptimize(transform_sample(f, v));
}
BENCHMARK(BM_TransformSample)->Arg(3)->Arg(6);

void BM_EstimatorPush(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const PhasorSpec spec = spec_for(n);
  const SampleSeries s = sample_series(spec, 10e3, 0.02);
  EstimatorConfig cfg;
  cfg.kappa = 8;
  cfg.sample_period = 1e-4;
  FrameEstimator est(n, cfg);
  double t = 0.0;
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(est.push_sample(s.row(i), t));
    i = (i + 1) % s.size();
    t += 1e-4;
  }
}
BENCHMARK(BM_EstimatorPush)->Arg(3)->Arg(6);

void BM_Scenario(benchmark::State& state) {
  const SimConfig cfg = SimConfig::defaults();
  for (auto _ : state) benchmark::DoNotOptimize(run_scenario(cfg));
}
BENCHMARK(BM_Scenario)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
