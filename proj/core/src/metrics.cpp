#include "reflexsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace reflexsim {

double FlowRecord::fraction_delivered() const {
  if (size_bytes == kSizeUnbounded) return 1.0;
  if (size_bytes == 0) return 1.0;
  return std::clamp(delivered_bytes / (double)size_bytes, 0.0, 1.0);
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw std::invalid_argument("percentile: empty input");
  if (!(p > 0.0) || p > 100.0)
    throw std::invalid_argument("percentile: p must be in (0, 100]");
  std::sort(values.begin(), values.end());
  size_t idx = (size_t)std::ceil(p / 100.0 * (double)values.size());
  if (idx > 0) --idx;
  if (idx >= values.size()) idx = values.size() - 1;
  return values[idx];
}

const char* to_string(SizeCategory c) {
  switch (c) {
    case SizeCategory::Tiny: return "tiny";
    case SizeCategory::Small: return "small";
    case SizeCategory::Medium: return "medium";
    case SizeCategory::Large: return "large";
  }
  return "?";
}

SizeCategory size_category(uint64_t size_bytes) {
  if (size_bytes == kSizeUnbounded) return SizeCategory::Large;
  if (size_bytes <= 10'000) return SizeCategory::Tiny;
  if (size_bytes <= 100'000) return SizeCategory::Small;
  if (size_bytes <= 10'000'000) return SizeCategory::Medium;
  return SizeCategory::Large;
}

SpeedupJoin speedup_join(const std::vector<FlowRecord>& baseline,
                         const std::vector<FlowRecord>& treated) {
  if (baseline.size() != treated.size())
    throw std::invalid_argument("speedup join: flow id sets differ");
  std::map<FlowId, const FlowRecord*> base;
  for (const FlowRecord& r : baseline) base[r.flow_id] = &r;
  SpeedupJoin out;
  for (const FlowRecord& t : treated) {
    auto it = base.find(t.flow_id);
    if (it == base.end())
      throw std::invalid_argument("speedup join: flow id sets differ");
    const FlowRecord& b = *it->second;
    if (b.finished() && t.finished())
      out.speedup[t.flow_id] = *b.fct_s / *t.fct_s;
    else
      ++out.excluded_unfinished;
  }
  return out;
}

double violation_fraction(const std::vector<double>& flexible_speedups,
                          double threshold) {
  if (!(threshold > 0.0) || threshold > 1.0)
    throw std::invalid_argument(
        "violation fraction: threshold must be in (0, 1]");
  if (flexible_speedups.empty()) return 0.0;
  int violations = 0;
  for (double s : flexible_speedups)
    if (s < threshold) ++violations;
  return (double)violations / (double)flexible_speedups.size();
}

namespace {

StatBlock make_block(const std::vector<const FlowRecord*>& recs) {
  StatBlock b;
  std::vector<double> fcts;
  double fct_sum = 0.0, rate_sum = 0.0;
  for (const FlowRecord* r : recs) {
    if (!r->finished()) {
      ++b.unfinished;
      continue;
    }
    ++b.count;
    fcts.push_back(*r->fct_s);
    fct_sum += *r->fct_s;
    rate_sum += r->mean_rate_bps;
  }
  if (b.count > 0) {
    b.fct_mean_s = fct_sum / b.count;
    b.fct_median_s = percentile(fcts, 50.0);
    b.fct_p90_s = percentile(fcts, 90.0);
    b.fct_p99_s = percentile(fcts, 99.0);
    b.mean_rate_mean_bps = rate_sum / b.count;
  }
  return b;
}

std::string fmt(double v) {
  char buf[64];
  snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

void write_block(std::ostream& out, const std::string& prefix,
                 const StatBlock& b) {
  out << prefix << ".count " << b.count << "\n";
  out << prefix << ".unfinished " << b.unfinished << "\n";
  out << prefix << ".fct_mean_s " << fmt(b.fct_mean_s) << "\n";
  out << prefix << ".fct_median_s " << fmt(b.fct_median_s) << "\n";
  out << prefix << ".fct_p90_s " << fmt(b.fct_p90_s) << "\n";
  out << prefix << ".fct_p99_s " << fmt(b.fct_p99_s) << "\n";
  out << prefix << ".mean_rate_mean_bps " << fmt(b.mean_rate_mean_bps) << "\n";
}

}  // namespace

RunSummary summarize(const std::vector<FlowRecord>& records,
                     const SimConfig& sim) {
  RunSummary s;
  s.flows_total = (int)records.size();
  double lo = sim.warmup_window_s;
  double hi = sim.duration_s - sim.cooldown_window_s;

  std::vector<const FlowRecord*> regular, flexible;
  std::map<SizeCategory, std::vector<const FlowRecord*>> by_size;
  std::vector<double> fractions;
  for (const FlowRecord& r : records) {
    if (r.finished()) ++s.flows_finished;
    if (r.arrival_time_s < lo || r.arrival_time_s > hi) continue;
    ++s.flows_measured;
    if (r.kind == FlowKind::Regular) {
      regular.push_back(&r);
      by_size[size_category(r.size_bytes)].push_back(&r);
    } else {
      flexible.push_back(&r);
      if (r.finished()) fractions.push_back(r.fraction_delivered());
    }
  }
  s.regular_all = make_block(regular);
  s.flexible_all = make_block(flexible);
  for (auto& [cat, recs] : by_size) s.regular_by_size[cat] = make_block(recs);

  s.fraction_delivered_count = (int)fractions.size();
  if (!fractions.empty()) {
    double sum = 0.0;
    double mn = fractions.front();
    for (double f : fractions) {
      sum += f;
      mn = std::min(mn, f);
    }
    s.fraction_delivered_mean = sum / fractions.size();
    s.fraction_delivered_min = mn;
    s.fraction_delivered_p50 = percentile(fractions, 50.0);
  }
  return s;
}

void write_summary(std::ostream& out, const RunSummary& s) {
  out << "flows_total " << s.flows_total << "\n";
  out << "flows_finished " << s.flows_finished << "\n";
  out << "flows_measured " << s.flows_measured << "\n";
  write_block(out, "regular", s.regular_all);
  write_block(out, "flexible", s.flexible_all);
  for (const auto& [cat, block] : s.regular_by_size)
    write_block(out, std::string("regular.") + to_string(cat), block);
  out << "fraction_delivered.count " << s.fraction_delivered_count << "\n";
  out << "fraction_delivered.mean " << fmt(s.fraction_delivered_mean) << "\n";
  out << "fraction_delivered.min " << fmt(s.fraction_delivered_min) << "\n";
  out << "fraction_delivered.p50 " << fmt(s.fraction_delivered_p50) << "\n";
}

}  // namespace reflexsim
