#include "reflexsim/types.hpp"

#include <algorithm>
#include <cmath>

namespace reflexsim {

const char* to_string(FlowKind k) {
  return k == FlowKind::Regular ? "regular" : "flexible";
}

const char* to_string(Priority p) { return p == Priority::High ? "HIGH" : "LOW"; }

const char* to_string(SchemeKind k) {
  switch (k) {
    case SchemeKind::Baseline: return "baseline";
    case SchemeKind::AbsolutePriority: return "absolute";
    case SchemeKind::WeightedPriority: return "weighted";
    case SchemeKind::ReFlex: return "reflex";
  }
  return "?";
}

double FlowSpec::accounting_alpha() const {
  return std::isinf(alpha) ? 1.0 : alpha;
}

FlowKind FlowSpec::kind_for(double alpha, double r) {
  return (std::isinf(alpha) && r >= 1.0) ? FlowKind::Regular
                                         : FlowKind::Flexible;
}

int Topology::link_index(LinkId id) const {
  for (size_t i = 0; i < links.size(); ++i)
    if (links[i].link_id == id) return (int)i;
  return -1;
}

const std::vector<LinkId>* Topology::route(const NodeId& src,
                                           const NodeId& dst) const {
  auto it = routes.find({src, dst});
  return it == routes.end() ? nullptr : &it->second;
}

std::vector<std::pair<NodeId, NodeId>> Topology::routed_pairs() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (const auto& [key, path] : routes)
    if (key.first != key.second && !path.empty()) out.push_back(key);
  return out;  // map iteration is already sorted
}

Scheme Scheme::baseline() { return Scheme{}; }

Scheme Scheme::absolute_priority() {
  Scheme s;
  s.kind = SchemeKind::AbsolutePriority;
  return s;
}

Scheme Scheme::weighted_priority(int w_high, int w_low) {
  Scheme s;
  s.kind = SchemeKind::WeightedPriority;
  s.weight_high = w_high;
  s.weight_low = w_low;
  return s;
}

Scheme Scheme::reflex(const PhaseConfig& phases) {
  Scheme s;
  s.kind = SchemeKind::ReFlex;
  s.phases = phases;
  return s;
}

}  // namespace reflexsim
