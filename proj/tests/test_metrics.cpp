#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>
#include <vector>

#include "reflexsim/metrics.hpp"

using namespace reflexsim;

namespace {

FlowRecord rec(FlowId id, FlowKind kind, uint64_t size, double arrival,
               double fct) {
  FlowRecord r;
  r.flow_id = id;
  r.kind = kind;
  r.size_bytes = size;
  r.arrival_time_s = arrival;
  if (fct >= 0.0) {
    r.fct_s = fct;
    r.completion_time_s = arrival + fct;
    r.delivered_bytes = (double)size;
    if (fct > 0.0) r.mean_rate_bps = (double)size * 8.0 / fct;
  }
  return r;
}

FlowRecord unfinished(FlowId id, FlowKind kind, uint64_t size,
                      double arrival) {
  return rec(id, kind, size, arrival, -1.0);
}

}  // namespace

TEST_CASE("nearest rank percentiles") {
  CHECK(percentile({3.0, 1.0, 2.0}, 50.0) == 2.0);
  CHECK(percentile({3.0, 1.0, 2.0}, 100.0) == 3.0);
  CHECK(percentile({3.0, 1.0, 2.0}, 1.0) == 1.0);
  CHECK(percentile({5.0}, 99.0) == 5.0);

  std::vector<double> v;
  for (int i = 1; i <= 100; ++i) v.push_back((double)i);
  CHECK(percentile(v, 99.0) == 99.0);
  CHECK(percentile(v, 90.0) == 90.0);
  CHECK(percentile(v, 50.0) == 50.0);
  CHECK(percentile(v, 100.0) == 100.0);

  CHECK_THROWS_AS(percentile({}, 50.0), std::invalid_argument);
  CHECK_THROWS_AS(percentile({1.0}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(percentile({1.0}, -5.0), std::invalid_argument);
  CHECK_THROWS_AS(percentile({1.0}, 100.5), std::invalid_argument);
}

TEST_CASE("size categories") {
  CHECK(size_category(1) == SizeCategory::Tiny);
  CHECK(size_category(10000) == SizeCategory::Tiny);
  CHECK(size_category(10001) == SizeCategory::Small);
  CHECK(size_category(100000) == SizeCategory::Small);
  CHECK(size_category(100001) == SizeCategory::Medium);
  CHECK(size_category(10000000) == SizeCategory::Medium);
  CHECK(size_category(10000001) == SizeCategory::Large);
  CHECK(size_category(kSizeUnbounded) == SizeCategory::Large);
  CHECK(std::string(to_string(SizeCategory::Tiny)) == "tiny");
  CHECK(std::string(to_string(SizeCategory::Large)) == "large");
}

TEST_CASE("delivered fraction clamps and defaults") {
  FlowRecord r = rec(0, FlowKind::Flexible, 1000, 0.0, 1.0);
  r.delivered_bytes = 682.5;
  CHECK(r.fraction_delivered() == doctest::Approx(0.6825));
  r.delivered_bytes = 1100.0;  // interpolation overshoot stays clamped
  CHECK(r.fraction_delivered() == 1.0);
  r.delivered_bytes = -1.0;
  CHECK(r.fraction_delivered() == 0.0);
  FlowRecord u = unfinished(1, FlowKind::Regular, kSizeUnbounded, 0.0);
  CHECK(u.fraction_delivered() == 1.0);
}

TEST_CASE("speedup join pairs runs by flow id") {
  std::vector<FlowRecord> base = {
      rec(0, FlowKind::Regular, 1000, 0.0, 2.0),
      rec(1, FlowKind::Flexible, 1000, 0.0, 3.0),
      unfinished(2, FlowKind::Regular, 1000, 0.0),
  };
  std::vector<FlowRecord> treated = {
      rec(1, FlowKind::Flexible, 1000, 0.0, 6.0),  // order differs on purpose
      rec(0, FlowKind::Regular, 1000, 0.0, 1.0),
      rec(2, FlowKind::Regular, 1000, 0.0, 1.0),
  };
  SpeedupJoin j = speedup_join(base, treated);
  REQUIRE(j.speedup.size() == 2);
  CHECK(j.speedup.at(0) == doctest::Approx(2.0));
  CHECK(j.speedup.at(1) == doctest::Approx(0.5));
  CHECK(j.excluded_unfinished == 1);

  std::vector<FlowRecord> other = {
      rec(5, FlowKind::Regular, 1000, 0.0, 1.0),
      rec(6, FlowKind::Regular, 1000, 0.0, 1.0),
      rec(7, FlowKind::Regular, 1000, 0.0, 1.0),
  };
  CHECK_THROWS_WITH_AS(speedup_join(base, other),
                       "speedup join: flow id sets differ",
                       std::invalid_argument);
  other.pop_back();
  CHECK_THROWS_AS(speedup_join(base, other), std::invalid_argument);
}

TEST_CASE("violation fraction counts strictly slower flows") {
  std::vector<double> s = {0.5, 1.0, 2.0};
  CHECK(violation_fraction(s, 1.0) == doctest::Approx(1.0 / 3));
  CHECK(violation_fraction(s, 0.5) == 0.0);  // 0.5 itself does not violate
  CHECK(violation_fraction(s, 0.6) == doctest::Approx(1.0 / 3));
  CHECK(violation_fraction({}, 0.8) == 0.0);
  CHECK_THROWS_AS(violation_fraction(s, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(violation_fraction(s, 1.5), std::invalid_argument);
}

TEST_CASE("summaries window on arrival time and split by kind") {
  SimConfig sim;
  sim.duration_s = 10.0;
  sim.warmup_window_s = 1.0;
  sim.cooldown_window_s = 2.0;  // measured window [1, 8]

  std::vector<FlowRecord> records = {
      rec(0, FlowKind::Regular, 5000, 0.5, 1.0),    // before the window
      rec(1, FlowKind::Regular, 5000, 1.0, 2.0),    // boundary, included
      rec(2, FlowKind::Regular, 500000, 4.0, 4.0),  // medium size bucket
      rec(3, FlowKind::Regular, 5000, 8.0, 1.0),    // boundary, included
      rec(4, FlowKind::Regular, 5000, 8.5, 1.0),    // after the window
      unfinished(5, FlowKind::Regular, 5000, 5.0),
      rec(6, FlowKind::Flexible, 1000, 2.0, 3.0),
      unfinished(7, FlowKind::Flexible, 1000, 3.0),
  };
  records[6].delivered_bytes = 900.0;  // fraction 0.9

  RunSummary s = summarize(records, sim);
  CHECK(s.flows_total == 8);
  CHECK(s.flows_finished == 6);
  CHECK(s.flows_measured == 6);

  CHECK(s.regular_all.count == 3);
  CHECK(s.regular_all.unfinished == 1);
  CHECK(s.regular_all.fct_mean_s == doctest::Approx((2.0 + 4.0 + 1.0) / 3));
  CHECK(s.regular_all.fct_median_s == doctest::Approx(2.0));
  CHECK(s.regular_all.fct_p99_s == doctest::Approx(4.0));

  CHECK(s.flexible_all.count == 1);
  CHECK(s.flexible_all.unfinished == 1);
  CHECK(s.flexible_all.fct_mean_s == doctest::Approx(3.0));

  REQUIRE(s.regular_by_size.count(SizeCategory::Tiny) == 1);
  REQUIRE(s.regular_by_size.count(SizeCategory::Medium) == 1);
  CHECK(s.regular_by_size.at(SizeCategory::Tiny).count == 2);
  CHECK(s.regular_by_size.at(SizeCategory::Medium).count == 1);
  CHECK(s.regular_by_size.count(SizeCategory::Large) == 0);

  CHECK(s.fraction_delivered_count == 1);
  CHECK(s.fraction_delivered_mean == doctest::Approx(0.9));
  CHECK(s.fraction_delivered_min == doctest::Approx(0.9));

  // Serialized form is stable key-value lines.
  std::ostringstream out;
  write_summary(out, s);
  std::string text = out.str();
  CHECK(text.find("flows_total 8\n") != std::string::npos);
  CHECK(text.find("regular.count 3\n") != std::string::npos);
  CHECK(text.find("regular.tiny.count 2\n") != std::string::npos);
  CHECK(text.find("flexible.unfinished 1\n") != std::string::npos);
  CHECK(text.find("fraction_delivered.mean 0.9\n") != std::string::npos);

  std::ostringstream out2;
  write_summary(out2, s);
  CHECK(out.str() == out2.str());
}

TEST_CASE("summary of an empty window") {
  SimConfig sim;
  sim.duration_s = 1.0;
  RunSummary s = summarize({}, sim);
  CHECK(s.flows_total == 0);
  CHECK(s.flows_measured == 0);
  CHECK(s.regular_all.count == 0);
  CHECK(s.fraction_delivered_count == 0);
  std::ostringstream out;
  write_summary(out, s);
  CHECK(out.str().find("flows_total 0\n") != std::string::npos);
}
