#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "reflexsim/types.hpp"

namespace reflexsim {

// Final accounting for one flow. completion_time/fct are empty while the
// flow was still unfinished at the end of the run.
struct FlowRecord {
  FlowId flow_id = 0;
  FlowKind kind = FlowKind::Regular;
  uint64_t size_bytes = kSizeUnbounded;
  double arrival_time_s = 0.0;
  std::optional<double> completion_time_s;
  std::optional<double> fct_s;
  double delivered_bytes = 0.0;
  double discarded_bytes = 0.0;
  double mean_rate_bps = 0.0;
  int priority_switches = 0;

  // Carried for analysis; not part of the serialized record.
  double alpha = kAlphaUnbounded;
  double r = 1.0;

  bool finished() const { return completion_time_s.has_value(); }
  double fraction_delivered() const;
};

// Nearest-rank percentile, p in (0, 100]. Throws on empty input.
double percentile(std::vector<double> values, double p);

enum class SizeCategory { Tiny, Small, Medium, Large };

const char* to_string(SizeCategory c);
SizeCategory size_category(uint64_t size_bytes);

struct SpeedupJoin {
  // flow_id -> fct_baseline / fct_treated, for flows finished in both runs
  std::map<FlowId, double> speedup;
  int excluded_unfinished = 0;
};

// Joins two runs of the same workload by flow id. Throws if the id sets
// differ.
SpeedupJoin speedup_join(const std::vector<FlowRecord>& baseline,
                         const std::vector<FlowRecord>& treated);

// Fraction of speedups strictly below threshold; threshold in (0, 1].
double violation_fraction(const std::vector<double>& flexible_speedups,
                          double threshold);

struct StatBlock {
  int count = 0;       // finished flows inside the measured window
  int unfinished = 0;  // measured-window flows that never finished
  double fct_mean_s = 0.0;
  double fct_median_s = 0.0;
  double fct_p90_s = 0.0;
  double fct_p99_s = 0.0;
  double mean_rate_mean_bps = 0.0;
};

struct RunSummary {
  int flows_total = 0;
  int flows_finished = 0;
  int flows_measured = 0;
  StatBlock regular_all;
  StatBlock flexible_all;
  std::map<SizeCategory, StatBlock> regular_by_size;
  // Delivered fraction across measured finished flexible flows.
  int fraction_delivered_count = 0;
  double fraction_delivered_mean = 0.0;
  double fraction_delivered_min = 0.0;
  double fraction_delivered_p50 = 0.0;
};

// Aggregates records over the measured window [warmup_window,
// duration - cooldown_window] keyed on arrival time.
RunSummary summarize(const std::vector<FlowRecord>& records,
                     const SimConfig& sim);

// Key-value lines, deterministic order.
void write_summary(std::ostream& out, const RunSummary& summary);

}  // namespace reflexsim
