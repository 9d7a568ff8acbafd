#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace reflexsim {

using NodeId = std::string;
using LinkId = int32_t;
using FlowId = int64_t;

// Unbounded sentinels. Serialized forms always use the string "inf",
// never a floating-point infinity.
inline constexpr double kAlphaUnbounded = std::numeric_limits<double>::infinity();
inline constexpr uint64_t kSizeUnbounded = std::numeric_limits<uint64_t>::max();

enum class FlowKind { Regular, Flexible };
enum class Priority { High, Low };

const char* to_string(FlowKind k);
const char* to_string(Priority p);

// One flow. alpha is the fraction of the max-min fair share the flow insists
// on (unbounded for regular traffic), r the fraction of its payload that must
// be delivered. A flow is regular exactly when alpha is unbounded and r == 1.
struct FlowSpec {
  FlowId flow_id = 0;
  NodeId src;
  NodeId dst;
  uint64_t size_bytes = kSizeUnbounded;  // unbounded only legal when r == 1
  double alpha = kAlphaUnbounded;        // [0, inf]
  double r = 1.0;                        // [0, 1]
  double arrival_time_s = 0.0;
  FlowKind kind = FlowKind::Regular;

  bool flexible() const { return kind == FlowKind::Flexible; }
  bool size_unbounded() const { return size_bytes == kSizeUnbounded; }

  // alpha as used in budget arithmetic. Delivery-only flexible flows
  // (r < 1 with alpha left unbounded) are accounted at full fair share.
  double accounting_alpha() const;

  static FlowKind kind_for(double alpha, double r);
};

struct LinkSpec {
  LinkId link_id = 0;
  NodeId tail;
  NodeId head;
  double capacity_bps = 0.0;
  double efficiency = 0.96;  // fraction of line rate actually attainable
  int weight_high = 9;
  int weight_low = 1;

  double effective_capacity_bps() const { return capacity_bps * efficiency; }
};

struct Topology {
  std::vector<NodeId> nodes;
  std::vector<LinkSpec> links;
  // (src, dst) -> ordered list of link ids forming the path
  std::map<std::pair<NodeId, NodeId>, std::vector<LinkId>> routes;

  // Position of a link id in links, or -1.
  int link_index(LinkId id) const;
  const std::vector<LinkId>* route(const NodeId& src, const NodeId& dst) const;
  // Sorted list of (src, dst) pairs that have a route, src != dst.
  std::vector<std::pair<NodeId, NodeId>> routed_pairs() const;
};

// Probing cycle layout: d_warmup + d_measure + d_exploit intervals of
// t_int_s seconds each.
struct PhaseConfig {
  double t_int_s = 0.005;
  int d_warmup = 1;
  int d_measure = 1;
  int d_exploit = 3;

  int cycle_intervals() const { return d_warmup + d_measure + d_exploit; }
  double cycle_seconds() const { return cycle_intervals() * t_int_s; }
};

enum class SchemeKind { Baseline, AbsolutePriority, WeightedPriority, ReFlex };

struct Scheme {
  SchemeKind kind = SchemeKind::Baseline;
  // WeightedPriority only: class weights applied on every link.
  int weight_high = 9;
  int weight_low = 1;
  // ReFlex only.
  PhaseConfig phases;

  static Scheme baseline();
  static Scheme absolute_priority();
  static Scheme weighted_priority(int w_high, int w_low);
  static Scheme reflex(const PhaseConfig& phases);
};

const char* to_string(SchemeKind k);

struct SimConfig {
  double tick_dt_s = 1e-4;
  double duration_s = 0.0;
  double warmup_window_s = 0.0;    // flows arriving earlier are unmeasured
  double cooldown_window_s = 0.0;  // flows arriving later are unmeasured
  double conv_tau_s = 1e-3;        // rate-rise time constant; 0 = instant
  uint64_t seed = 1;
};

}  // namespace reflexsim
