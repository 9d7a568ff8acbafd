#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "reflexsim/types.hpp"

namespace reflexsim {

// Empirical flow-size distribution: (size_bytes, cumulative probability)
// points, sampled by inversion with linear interpolation between points.
struct SizeCdfTable {
  std::vector<std::pair<uint64_t, double>> points;

  // Two whitespace-separated columns, '#' starts a comment.
  static SizeCdfTable load(const std::filesystem::path& file);
  static SizeCdfTable parse(std::istream& in, const std::string& name);

  void validate(const std::string& name) const;  // throws on bad tables
  uint64_t sample(double u) const;               // u in [0, 1)
  double mean_bytes() const;
  uint64_t min_bytes() const;
  uint64_t max_bytes() const;
};

// One flow population: arrival process, size law, flow template, endpoints.
struct ArrivalProcess {
  enum class ArrivalKind { Poisson, FixedTimes };
  ArrivalKind arrival_kind = ArrivalKind::FixedTimes;
  double rate_per_s = 0.0;            // Poisson
  std::vector<double> times_s;        // FixedTimes

  enum class SizeKind { Constant, EmpiricalCdf };
  SizeKind size_kind = SizeKind::Constant;
  uint64_t constant_bytes = kSizeUnbounded;
  SizeCdfTable cdf;

  double alpha = kAlphaUnbounded;     // flow template
  double r = 1.0;

  enum class EndpointKind { Fixed, AllPairsUniform };
  EndpointKind endpoint_kind = EndpointKind::Fixed;
  NodeId src;
  NodeId dst;
  // AllPairsUniform draws uniformly from this (sorted) list of routed pairs.
  std::vector<std::pair<NodeId, NodeId>> candidates;
};

// Deterministic expansion of one process over [0, duration). flow_ids are
// the sequence 0..n-1; callers renumber when merging processes.
std::vector<FlowSpec> generate(const ArrivalProcess& process,
                               double duration_s, uint64_t seed);

// Arrival rate that drives `link_count` access links of `capacity_bps` to
// the requested utilization with flows of the given mean size.
double target_rate_for_utilization(double mean_size_bytes, int link_count,
                                   double capacity_bps, double utilization);

// Stable per-workload child seed for merged scenarios.
uint64_t child_seed(uint64_t seed, uint64_t index);

}  // namespace reflexsim
