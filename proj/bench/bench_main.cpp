// Serial reference against the OpenMP kernels: contact tables and whole
// repetition sets.

#include <benchmark/benchmark.h>

#include "stealth/harness/experiment.hpp"
#include "stealth/sim/contacts.hpp"
#include "stealth/sim/mobility.hpp"

using namespace stealth;

namespace {

const sim::MobilityTrace& default_trace() {
  static const sim::MobilityTrace trace = [] {
    sim::SyntheticParams p;
    p.seed = 1;
    return sim::generate_synthetic(p);
  }();
  return trace;
}

void BM_ContactsSerial(benchmark::State& state) {
  const auto& trace = default_trace();
  for (auto _ : state) benchmark::DoNotOptimize(sim::build_contacts_serial(trace, 50.0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trace.snapshots.size()));
}
BENCHMARK(BM_ContactsSerial)->Unit(benchmark::kMillisecond);

void BM_ContactsParallel(benchmark::State& state) {
  const auto& trace = default_trace();
  for (auto _ : state) benchmark::DoNotOptimize(sim::build_contacts(trace, 50.0));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(trace.snapshots.size()));
}
BENCHMARK(BM_ContactsParallel)->Unit(benchmark::kMillisecond);

// Repetitions with a given worker count; 1 is the serial path.
void BM_Repetitions(benchmark::State& state) {
  const auto cfg = harness::build_scenario(
      "senack", {{"reps", "8"}, {"duration", "300"}, {"emergency-time", "200"},
                 {"workers", std::to_string(state.range(0))}});
  for (auto _ : state) benchmark::DoNotOptimize(harness::run_experiment(cfg));
  state.SetItemsProcessed(state.iterations() * 8);
}
BENCHMARK(BM_Repetitions)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
