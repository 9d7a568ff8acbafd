#include <benchmark/benchmark.h>

#include <vector>

#include "reflexsim/engine.hpp"

using namespace reflexsim;

namespace {

// One shared link, half the flows flexible, staggered arrivals.
Scenario make_scenario(int n_flows, SchemeKind kind) {
  Topology topo;
  topo.nodes = {"a", "b"};
  topo.links.push_back({0, "a", "b", 1e10, 1.0});
  topo.routes[{"a", "b"}] = {0};

  std::vector<FlowSpec> flows;
  for (int i = 0; i < n_flows; ++i) {
    FlowSpec f;
    f.flow_id = i;
    f.src = "a";
    f.dst = "b";
    f.size_bytes = 50'000'000;
    f.arrival_time_s = 0.01 * i;
    if (i % 2 == 0) {
      f.alpha = 0.5;
      f.r = 0.9;
      f.kind = FlowKind::Flexible;
    }
    flows.push_back(f);
  }

  Scheme scheme;
  switch (kind) {
    case SchemeKind::ReFlex: scheme = Scheme::reflex(PhaseConfig{}); break;
    case SchemeKind::WeightedPriority:
      scheme = Scheme::weighted_priority(9, 1);
      break;
    default: scheme = Scheme::baseline(); break;
  }

  SimConfig sim;
  sim.duration_s = 1.0;
  sim.conv_tau_s = 1e-3;

  ValidationResult res = validate_scenario(topo, flows, scheme, sim);
  return *res.scenario;
}

void BM_EngineBaseline(benchmark::State& state) {
  Scenario scen = make_scenario((int)state.range(0), SchemeKind::Baseline);
  for (auto _ : state) {
    RunResult res = run(scen);
    benchmark::DoNotOptimize(res.records);
  }
}
BENCHMARK(BM_EngineBaseline)->Arg(8)->Arg(64);

void BM_EngineReflex(benchmark::State& state) {
  Scenario scen = make_scenario((int)state.range(0), SchemeKind::ReFlex);
  for (auto _ : state) {
    RunResult res = run(scen);
    benchmark::DoNotOptimize(res.records);
  }
}
BENCHMARK(BM_EngineReflex)->Arg(8)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
