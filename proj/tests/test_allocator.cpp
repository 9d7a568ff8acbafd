#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>
#include <vector>

#include "reflexsim/allocator.hpp"
#include "support/oracles.hpp"

using namespace reflexsim;

namespace {

// Topology with a given list of directed link capacities; node names are
// irrelevant for the allocator, which works off link positions.
Topology links_only(const std::vector<double>& caps, int w_high = 9,
                    int w_low = 1) {
  Topology t;
  t.nodes = {"a", "b"};
  for (size_t i = 0; i < caps.size(); ++i) {
    LinkSpec l;
    l.link_id = (LinkId)i;
    l.tail = "a";
    l.head = "b";
    l.capacity_bps = caps[i];
    l.efficiency = 1.0;
    l.weight_high = w_high;
    l.weight_low = w_low;
    t.links.push_back(l);
  }
  return t;
}

}  // namespace

TEST_CASE("single class progressive filling on the shared-link chain") {
  // Three flows through link 0, one of them continuing through link 1 where
  // a fourth flow lives. The continuing flow is stuck at a third, so the
  // fourth picks up the slack.
  std::vector<double> caps = {1e9, 1e9};
  std::vector<MaxminFlow> flows = {
      {0, {0}}, {1, {0}}, {2, {0, 1}}, {3, {1}}};
  auto rates = maxmin_single_class(caps, flows);
  REQUIRE(rates.size() == 4);
  CHECK(rates[0] == doctest::Approx(1e9 / 3).epsilon(1e-12));
  CHECK(rates[1] == doctest::Approx(1e9 / 3).epsilon(1e-12));
  CHECK(rates[2] == doctest::Approx(1e9 / 3).epsilon(1e-12));
  CHECK(rates[3] == doctest::Approx(2e9 / 3).epsilon(1e-12));
  CHECK(oracles::is_maxmin_optimal(caps, flows, rates, 1.0));
}

TEST_CASE("single class tie breaks and an even chain") {
  std::vector<double> caps = {1e9, 1e9};
  std::vector<MaxminFlow> flows = {{0, {0}}, {1, {0, 1}}, {2, {1}}};
  auto rates = maxmin_single_class(caps, flows);
  CHECK(rates[0] == doctest::Approx(5e8).epsilon(1e-12));
  CHECK(rates[1] == doctest::Approx(5e8).epsilon(1e-12));
  CHECK(rates[2] == doctest::Approx(5e8).epsilon(1e-12));
}

TEST_CASE("single class edge cases") {
  CHECK(maxmin_single_class({1e9}, {}).empty());
  auto one = maxmin_single_class({1e9}, {{0, {0}}});
  CHECK(one[0] == doctest::Approx(1e9));
  CHECK_THROWS_AS(maxmin_single_class({1e9}, {{0, {}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(maxmin_single_class({1e9}, {{0, {1}}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(maxmin_single_class({1e9}, {{0, {-1}}}),
                  std::invalid_argument);
}

TEST_CASE("class split lends unused share") {
  // 9:1 on 10 units. The low class asking for 0.4 cedes 0.6 to high.
  auto [h, l] = split_class_capacity(10.0, 9, 1, true, true, 9.6, 0.4);
  CHECK(h == doctest::Approx(9.6));
  CHECK(l == doctest::Approx(0.4));

  // Both saturating: plain weighted shares.
  std::tie(h, l) = split_class_capacity(10.0, 9, 1, true, true, 100.0, 100.0);
  CHECK(h == doctest::Approx(9.0));
  CHECK(l == doctest::Approx(1.0));

  // High under its share: low picks up the slack.
  std::tie(h, l) = split_class_capacity(10.0, 9, 1, true, true, 3.0, 7.0);
  CHECK(h == doctest::Approx(3.0));
  CHECK(l == doctest::Approx(7.0));

  // Absent classes take nothing.
  std::tie(h, l) = split_class_capacity(10.0, 9, 1, true, false, 5.0, 0.0);
  CHECK(h == doctest::Approx(10.0));
  CHECK(l == 0.0);
  std::tie(h, l) = split_class_capacity(10.0, 9, 1, false, true, 0.0, 5.0);
  CHECK(h == 0.0);
  CHECK(l == doctest::Approx(10.0));
}

TEST_CASE("class split matches a packet-level deficit round robin") {
  struct Case {
    double demand_h, demand_l;
  };
  // Demands in units/s on a 10 unit/s link with 9:1 quanta.
  for (Case c : {Case{9.6, 0.4}, Case{20.0, 20.0}, Case{3.0, 7.0},
                 Case{12.0, 0.5}}) {
    auto drr = oracles::drr_two_queue(10.0, 9, 1, c.demand_h, c.demand_l,
                                      20000.0);

    // Fixed point of split + demand caps, the fluid model of the same link.
    double take_h = c.demand_h, take_l = c.demand_l;
    for (int i = 0; i < 50; ++i) {
      auto [ch, cl] =
          split_class_capacity(10.0, 9, 1, true, true, take_h, take_l);
      take_h = std::min(c.demand_h, ch);
      take_l = std::min(c.demand_l, cl);
    }
    CAPTURE(c.demand_h);
    CAPTURE(c.demand_l);
    CHECK(take_h == doctest::Approx(drr.high).epsilon(0.02));
    CHECK(take_l == doctest::Approx(drr.low).epsilon(0.02));
  }
}

TEST_CASE("allocate under each scheme on one contested link") {
  Topology t = links_only({10.0});
  std::vector<ActiveFlow> flows(2);
  std::vector<int> route = {0};
  flows[0] = {0, route, Priority::High};
  flows[1] = {1, route, Priority::Low};

  auto base = allocate(t, flows, Scheme::baseline());
  CHECK(base.rate_bps[0] == doctest::Approx(5.0));
  CHECK(base.rate_bps[1] == doctest::Approx(5.0));
  CHECK(base.iterations_used == 1);

  auto abs = allocate(t, flows, Scheme::absolute_priority());
  CHECK(abs.rate_bps[0] == doctest::Approx(10.0));
  CHECK(abs.rate_bps[1] == doctest::Approx(0.0));

  auto wgt = allocate(t, flows, Scheme::weighted_priority(9, 1));
  CHECK(wgt.converged);
  CHECK(wgt.rate_bps[0] == doctest::Approx(9.0));
  CHECK(wgt.rate_bps[1] == doctest::Approx(1.0));

  // ReFlex uses the per-link weights, 9:1 here as well.
  PhaseConfig phases;
  auto rfx = allocate(t, flows, Scheme::reflex(phases));
  CHECK(rfx.rate_bps[0] == doctest::Approx(9.0));
  CHECK(rfx.rate_bps[1] == doctest::Approx(1.0));
}

TEST_CASE("allocate lends a bottlenecked class's share") {
  // High is stuck at 2 units on its private second hop, so low rides the
  // shared link at 8 rather than its 1 unit weighted share.
  Topology t = links_only({10.0, 2.0});
  std::vector<int> high_route = {0, 1};
  std::vector<int> low_route = {0};
  std::vector<ActiveFlow> flows(2);
  flows[0] = {0, high_route, Priority::High};
  flows[1] = {1, low_route, Priority::Low};

  ClassDemandView view;
  auto res = allocate(t, flows, Scheme::weighted_priority(9, 1), &view);
  CHECK(res.converged);
  CHECK(res.rate_bps[0] == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(res.rate_bps[1] == doctest::Approx(8.0).epsilon(1e-5));
  CHECK(view.per_link[0].c_high_bps + view.per_link[0].c_low_bps ==
        doctest::Approx(10.0));
  CHECK(view.per_link[0].high_flows == std::vector<FlowId>{0});
  CHECK(view.per_link[0].low_flows == std::vector<FlowId>{1});

  // Same story under absolute priority: strict preemption, then leftovers.
  auto abs = allocate(t, flows, Scheme::absolute_priority());
  CHECK(abs.rate_bps[0] == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(abs.rate_bps[1] == doctest::Approx(8.0).epsilon(1e-5));
}

TEST_CASE("allocate result does not depend on input order") {
  Topology t = links_only({10.0, 4.0});
  std::vector<int> r0 = {0};
  std::vector<int> r1 = {0, 1};
  std::vector<int> r2 = {1};
  std::vector<ActiveFlow> a = {{0, r0, Priority::High},
                               {1, r1, Priority::Low},
                               {2, r2, Priority::High}};
  std::vector<ActiveFlow> b = {a[2], a[0], a[1]};
  auto ra = allocate(t, a, Scheme::weighted_priority(9, 1));
  auto rb = allocate(t, b, Scheme::weighted_priority(9, 1));
  REQUIRE(ra.rate_bps.size() == rb.rate_bps.size());
  for (const auto& [id, rate] : ra.rate_bps)
    CHECK(rate == doctest::Approx(rb.rate_bps.at(id)).epsilon(1e-12));
}

TEST_CASE("random single class instances are max-min optimal") {
  std::mt19937 rng(20260819);
  std::uniform_real_distribution<double> cap_dist(1.0, 10.0);
  std::uniform_int_distribution<int> nl_dist(1, 4);
  std::uniform_int_distribution<int> nf_dist(1, 6);
  std::bernoulli_distribution on_link(0.5);

  for (int trial = 0; trial < 300; ++trial) {
    int n_links = nl_dist(rng);
    int n_flows = nf_dist(rng);
    std::vector<double> caps(n_links);
    for (double& c : caps) c = cap_dist(rng);
    std::vector<MaxminFlow> flows;
    for (int i = 0; i < n_flows; ++i) {
      MaxminFlow f{i, {}};
      for (int l = 0; l < n_links; ++l)
        if (on_link(rng)) f.links.push_back(l);
      if (f.links.empty())
        f.links.push_back((int)(rng() % (unsigned)n_links));
      flows.push_back(std::move(f));
    }
    auto rates = maxmin_single_class(caps, flows);

    // Scale invariance comes along for free.
    std::vector<double> caps2 = caps;
    for (double& c : caps2) c *= 3.0;
    auto rates2 = maxmin_single_class(caps2, flows);

    CAPTURE(trial);
    CHECK(oracles::is_maxmin_optimal(caps, flows, rates, 1e-7));
    for (int i = 0; i < n_flows; ++i)
      CHECK(rates2[i] == doctest::Approx(3.0 * rates[i]).epsilon(1e-9));
  }
}

TEST_CASE("random two-class instances satisfy the fixed point invariants") {
  std::mt19937 rng(424242);
  std::uniform_real_distribution<double> cap_dist(1.0, 10.0);
  std::uniform_int_distribution<int> nl_dist(1, 4);
  std::uniform_int_distribution<int> nf_dist(1, 6);
  std::bernoulli_distribution on_link(0.5);
  std::bernoulli_distribution is_high(0.5);
  const Scheme schemes[] = {Scheme::weighted_priority(9, 1),
                            Scheme::weighted_priority(3, 2),
                            Scheme::absolute_priority()};

  int converged_count = 0, total = 0;
  for (int trial = 0; trial < 300; ++trial) {
    int n_links = nl_dist(rng);
    int n_flows = nf_dist(rng);
    std::vector<double> caps(n_links);
    for (double& c : caps) c = cap_dist(rng);
    Topology t = links_only(caps);

    std::vector<std::vector<int>> routes(n_flows);
    std::vector<ActiveFlow> flows(n_flows);
    for (int i = 0; i < n_flows; ++i) {
      for (int l = 0; l < n_links; ++l)
        if (on_link(rng)) routes[i].push_back(l);
      if (routes[i].empty())
        routes[i].push_back((int)(rng() % (unsigned)n_links));
      flows[i] = {i, routes[i],
                  is_high(rng) ? Priority::High : Priority::Low};
    }
    const Scheme& scheme = schemes[trial % 3];
    ClassDemandView view;
    auto res = allocate(t, flows, scheme, &view);
    ++total;
    CAPTURE(trial);

    // Feasibility holds whether or not the split iteration settled.
    std::vector<double> used(n_links, 0.0);
    for (int i = 0; i < n_flows; ++i)
      for (int l : routes[i]) used[l] += res.rate_bps.at(i);
    for (int l = 0; l < n_links; ++l) CHECK(used[l] <= caps[l] * (1 + 1e-9));

    if (!res.converged) continue;
    ++converged_count;

    // Within each class, the rates must be max-min optimal against the
    // virtual capacities the allocator settled on. The view holds the
    // post-fill re-split, one relaxation step past the rates, hence the
    // loose tolerance.
    std::vector<double> c_high(n_links), c_low(n_links);
    std::vector<MaxminFlow> high, low;
    std::vector<double> rh, rl;
    for (int l = 0; l < n_links; ++l) {
      c_high[l] = view.per_link[l].c_high_bps;
      c_low[l] = view.per_link[l].c_low_bps;
    }
    for (int i = 0; i < n_flows; ++i) {
      MaxminFlow f{i, routes[i]};
      if (flows[i].priority == Priority::High) {
        high.push_back(f);
        rh.push_back(res.rate_bps.at(i));
      } else {
        low.push_back(f);
        rl.push_back(res.rate_bps.at(i));
      }
    }
    CHECK(oracles::is_maxmin_optimal(c_high, high, rh, 1e-4 * 10.0));
    if (scheme.kind != SchemeKind::AbsolutePriority)
      CHECK(oracles::is_maxmin_optimal(c_low, low, rl, 1e-4 * 10.0));
  }
  // The relaxation is expected to settle on essentially every instance.
  CHECK(converged_count >= total * 95 / 100);
}
