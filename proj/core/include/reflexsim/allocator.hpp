#pragma once

#include <map>
#include <span>
#include <utility>
#include <vector>

#include "reflexsim/types.hpp"

namespace reflexsim {

struct MaxminFlow {
  FlowId flow_id = 0;
  std::vector<int> links;  // positions into the capacity vector
};

// Classic progressive filling: repeatedly saturate the most constrained link
// (smallest residual capacity per unfrozen flow) and freeze its flows at the
// common level. Ties go to the lowest link position. Returns one rate per
// flow, in input order.
std::vector<double> maxmin_single_class(const std::vector<double>& capacity_bps,
                                        const std::vector<MaxminFlow>& flows);

// Weighted split of one link's effective capacity between the two priority
// classes. A class that is absent, or whose takeup falls short of its
// proportional share, lends the slack to the other class so the link never
// idles while anyone is backlogged.
std::pair<double, double> split_class_capacity(double effective_bps, int w_high,
                                               int w_low, bool high_present,
                                               bool low_present,
                                               double high_takeup_bps,
                                               double low_takeup_bps);

std::pair<double, double> split_link_capacity(const LinkSpec& link,
                                              bool high_present,
                                              bool low_present,
                                              double high_takeup_bps,
                                              double low_takeup_bps);

struct ActiveFlow {
  FlowId flow_id = 0;
  std::span<const int> route;  // link positions
  Priority priority = Priority::High;
};

// Per-link class membership and the capacity split the allocator settled on.
struct ClassDemandView {
  struct LinkClassState {
    std::vector<FlowId> high_flows;
    std::vector<FlowId> low_flows;
    double c_high_bps = 0.0;
    double c_low_bps = 0.0;
  };
  std::vector<LinkClassState> per_link;
};

struct AllocationResult {
  std::map<FlowId, double> rate_bps;
  int iterations_used = 0;
  bool converged = true;
};

// Priority-aware max-min: fixed point between per-link class splits and
// per-class progressive filling. Baseline collapses to one class;
// AbsolutePriority gives the low class only what the high class leaves.
AllocationResult allocate(const Topology& topology,
                          const std::vector<ActiveFlow>& flows,
                          const Scheme& scheme,
                          ClassDemandView* view = nullptr);

}  // namespace reflexsim
