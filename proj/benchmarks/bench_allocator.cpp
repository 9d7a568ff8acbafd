#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "reflexsim/allocator.hpp"

using namespace reflexsim;

namespace {

// Star of `servers` hosts behind one switch, one up and one down link each.
Topology make_star(int servers) {
  Topology topo;
  topo.nodes.push_back("tor");
  for (int i = 0; i < servers; ++i) {
    NodeId name = "h" + std::to_string(i);
    topo.nodes.push_back(name);
    LinkSpec up{2 * i, name, "tor", 1e10};
    LinkSpec down{2 * i + 1, "tor", name, 1e10};
    topo.links.push_back(up);
    topo.links.push_back(down);
  }
  return topo;
}

struct FlowSet {
  std::vector<std::vector<int>> routes;
  std::vector<ActiveFlow> flows;
};

FlowSet make_flows(const Topology& topo, int n_flows) {
  int servers = (int)topo.links.size() / 2;
  std::mt19937_64 rng(7);
  FlowSet set;
  set.routes.reserve(n_flows);
  for (int i = 0; i < n_flows; ++i) {
    int src = (int)(rng() % servers);
    int dst = (int)(rng() % (servers - 1));
    if (dst >= src) ++dst;
    set.routes.push_back({2 * src, 2 * dst + 1});
  }
  for (int i = 0; i < n_flows; ++i) {
    ActiveFlow f;
    f.flow_id = i;
    f.route = std::span<const int>(set.routes[i]);
    f.priority = rng() % 4 == 0 ? Priority::Low : Priority::High;
    set.flows.push_back(f);
  }
  return set;
}

void BM_AllocateWeighted(benchmark::State& state) {
  Topology topo = make_star(32);
  FlowSet set = make_flows(topo, (int)state.range(0));
  Scheme scheme = Scheme::weighted_priority(9, 1);
  for (auto _ : state) {
    AllocationResult res = allocate(topo, set.flows, scheme);
    benchmark::DoNotOptimize(res.rate_bps);
  }
}
BENCHMARK(BM_AllocateWeighted)->Arg(10)->Arg(100)->Arg(1000);

void BM_AllocateBaseline(benchmark::State& state) {
  Topology topo = make_star(32);
  FlowSet set = make_flows(topo, (int)state.range(0));
  Scheme scheme = Scheme::baseline();
  for (auto _ : state) {
    AllocationResult res = allocate(topo, set.flows, scheme);
    benchmark::DoNotOptimize(res.rate_bps);
  }
}
BENCHMARK(BM_AllocateBaseline)->Arg(10)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
