#include <benchmark/benchmark.h>

#include "resedf/edf.hpp"
#include "resedf/efficiency.hpp"
#include "resedf/simulation.hpp"

using namespace resedf;

namespace {

simulation::SimulatedSample sample_of(std::size_t n)
{
  auto stream = simulation::derive_stream(1, n, 0);
  return simulation::generate_dataset(simulation::TrueModel::reference(), n, stream);
}

void BM_ResidualsSerial(benchmark::State& state)
{
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto sample = sample_of(n);
  const auto cfg = simulation::StudyConfig{}.smoother_for(n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(edf::complete_case_residuals_serial(sample.data, cfg));
  }
}

void BM_ResidualsParallel(benchmark::State& state)
{
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto sample = sample_of(n);
  const auto cfg = simulation::StudyConfig{}.smoother_for(n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(edf::complete_case_residuals(sample.data, cfg));
  }
}

void BM_ReplicationsSerial(benchmark::State& state)
{
  simulation::StudyConfig cfg;
  cfg.replications = 16;
  const auto model = simulation::TrueModel::reference();
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulation::run_replications_serial(model, static_cast<std::size_t>(state.range(0)), cfg));
  }
}

void BM_ReplicationsParallel(benchmark::State& state)
{
  simulation::StudyConfig cfg;
  cfg.replications = 16;
  const auto model = simulation::TrueModel::reference();
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulation::run_replications(model, static_cast<std::size_t>(state.range(0)), cfg));
  }
}

void BM_AmseCurve(benchmark::State& state)
{
  const auto law = efficiency::ErrorLaw::standard_normal();
  const efficiency::MissingnessSummary miss(0.5);
  const auto grid = edf::uniform_grid(-5.0, 5.0, 0.01);
  for (auto _ : state) {
    benchmark::DoNotOptimize(efficiency::amse_curve(law, miss, grid));
  }
}

} // namespace

BENCHMARK(BM_ResidualsSerial)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ResidualsParallel)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplicationsSerial)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplicationsParallel)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AmseCurve)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
