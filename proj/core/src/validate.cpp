#include "reflexsim/validate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

namespace reflexsim {

const char* to_string(ValidationCode c) {
  switch (c) {
    case ValidationCode::MissingRoute: return "MissingRoute";
    case ValidationCode::InvalidReliability: return "InvalidReliability";
    case ValidationCode::InvalidAlpha: return "InvalidAlpha";
    case ValidationCode::SizeRequired: return "SizeRequired";
    case ValidationCode::KindMismatch: return "KindMismatch";
    case ValidationCode::DuplicateFlowId: return "DuplicateFlowId";
    case ValidationCode::BadArrival: return "BadArrival";
    case ValidationCode::BadLink: return "BadLink";
    case ValidationCode::BadRoute: return "BadRoute";
    case ValidationCode::BadPhase: return "BadPhase";
    case ValidationCode::BadSim: return "BadSim";
    case ValidationCode::TickMisaligned: return "TickMisaligned";
  }
  return "?";
}

namespace {

struct Ctx {
  std::vector<ValidationError> errors;

  template <typename... Args>
  void fail(ValidationCode code, Args&&... parts) {
    std::ostringstream os;
    (os << ... << parts);
    errors.push_back({code, os.str()});
  }
};

void check_topology(const Topology& t, Ctx& ctx) {
  std::set<NodeId> nodes(t.nodes.begin(), t.nodes.end());
  if (nodes.size() != t.nodes.size())
    ctx.fail(ValidationCode::BadLink, "duplicate node ids in topology");

  std::set<LinkId> ids;
  for (const auto& l : t.links) {
    if (!ids.insert(l.link_id).second)
      ctx.fail(ValidationCode::BadLink, "duplicate link id ", l.link_id);
    if (!(l.capacity_bps > 0))
      ctx.fail(ValidationCode::BadLink, "link ", l.link_id,
               ": capacity must be positive");
    if (!(l.efficiency > 0.0) || l.efficiency > 1.0)
      ctx.fail(ValidationCode::BadLink, "link ", l.link_id,
               ": efficiency must be in (0, 1]");
    if (l.weight_high < 0 || l.weight_low < 0 ||
        l.weight_high + l.weight_low <= 0)
      ctx.fail(ValidationCode::BadLink, "link ", l.link_id,
               ": class weights must be nonnegative with a positive sum");
    if (!nodes.count(l.tail) || !nodes.count(l.head))
      ctx.fail(ValidationCode::BadLink, "link ", l.link_id,
               ": endpoint not a declared node");
    if (l.tail == l.head)
      ctx.fail(ValidationCode::BadLink, "link ", l.link_id, ": self loop");
  }

  for (const auto& [key, path] : t.routes) {
    const auto& [src, dst] = key;
    auto where = [&] { return "route " + src + "->" + dst; };
    if (src == dst) {
      ctx.fail(ValidationCode::BadRoute, where(), ": src equals dst");
      continue;
    }
    if (path.empty()) {
      ctx.fail(ValidationCode::BadRoute, where(), ": empty link list");
      continue;
    }
    std::set<NodeId> visited;
    NodeId at = src;
    bool broken = false;
    for (LinkId id : path) {
      int pos = t.link_index(id);
      if (pos < 0) {
        ctx.fail(ValidationCode::BadRoute, where(), ": unknown link ", id);
        broken = true;
        break;
      }
      const LinkSpec& l = t.links[pos];
      if (l.tail != at) {
        ctx.fail(ValidationCode::BadRoute, where(), ": link ", id,
                 " does not continue the path");
        broken = true;
        break;
      }
      if (!visited.insert(at).second) {
        ctx.fail(ValidationCode::BadRoute, where(), ": revisits node ", at);
        broken = true;
        break;
      }
      at = l.head;
    }
    if (!broken && at != dst)
      ctx.fail(ValidationCode::BadRoute, where(), ": path ends at ", at);
  }
}

void check_flow(const FlowSpec& f, const Topology& t, Ctx& ctx) {
  auto where = [&] {
    return "flow " + std::to_string(f.flow_id);
  };
  if (std::isnan(f.r) || f.r < 0.0 || f.r > 1.0)
    ctx.fail(ValidationCode::InvalidReliability, where(),
             ": r must be in [0, 1]");
  if (std::isnan(f.alpha) || f.alpha < 0.0)
    ctx.fail(ValidationCode::InvalidAlpha, where(),
             ": alpha must be nonnegative or unbounded");
  if (f.r < 1.0 && f.size_unbounded())
    ctx.fail(ValidationCode::SizeRequired, where(),
             ": partial delivery (r < 1) requires a bounded size");
  if (!f.size_unbounded() && f.size_bytes == 0)
    ctx.fail(ValidationCode::SizeRequired, where(), ": size must be positive");
  if (f.kind != FlowSpec::kind_for(f.alpha, f.r))
    ctx.fail(ValidationCode::KindMismatch, where(),
             ": kind does not match alpha/r (regular iff alpha unbounded and r == 1)");
  if (std::isnan(f.arrival_time_s) || f.arrival_time_s < 0.0)
    ctx.fail(ValidationCode::BadArrival, where(),
             ": arrival time must be nonnegative");
  if (!t.route(f.src, f.dst))
    ctx.fail(ValidationCode::MissingRoute, where(), ": no route ", f.src,
             "->", f.dst);
}

void check_sim(const SimConfig& s, const Scheme& scheme, Ctx& ctx) {
  if (!(s.tick_dt_s > 0))
    ctx.fail(ValidationCode::BadSim, "tick_dt must be positive");
  if (!(s.duration_s > 0))
    ctx.fail(ValidationCode::BadSim, "duration must be positive");
  if (s.conv_tau_s < 0)
    ctx.fail(ValidationCode::BadSim, "conv_tau must be nonnegative");
  if (s.warmup_window_s < 0 || s.cooldown_window_s < 0 ||
      s.warmup_window_s + s.cooldown_window_s > s.duration_s)
    ctx.fail(ValidationCode::BadSim,
             "warmup/cooldown windows must be nonnegative and fit the duration");

  if (scheme.kind == SchemeKind::ReFlex) {
    const PhaseConfig& p = scheme.phases;
    if (!(p.t_int_s > 0) || p.d_warmup <= 0 || p.d_measure <= 0 ||
        p.d_exploit <= 0)
      ctx.fail(ValidationCode::BadPhase,
               "phase config requires positive t_int and interval counts");
  }
  if (scheme.kind == SchemeKind::WeightedPriority &&
      (scheme.weight_high < 0 || scheme.weight_low < 0 ||
       scheme.weight_high + scheme.weight_low <= 0))
    ctx.fail(ValidationCode::BadSim,
             "scheme weights must be nonnegative with a positive sum");
}

// The controller runs on interval boundaries, so intervals must land exactly
// on ticks and be long enough that the fluid loop resolves them.
int ticks_per_interval_or_fail(const SimConfig& s, const PhaseConfig& p,
                               Ctx& ctx) {
  if (!(s.tick_dt_s > 0) || !(p.t_int_s > 0)) return 0;
  double ratio = p.t_int_s / s.tick_dt_s;
  int64_t k = (int64_t)std::llround(ratio);
  if (k <= 0 || std::fabs(ratio - (double)k) > 1e-6 * ratio) {
    ctx.fail(ValidationCode::TickMisaligned,
             "t_int must be an integer multiple of tick_dt");
    return 0;
  }
  if (k < 10) {
    ctx.fail(ValidationCode::TickMisaligned,
             "tick_dt must be at most t_int / 10");
    return 0;
  }
  return (int)k;
}

}  // namespace

ValidationResult validate_scenario(const Topology& topology,
                                   const std::vector<FlowSpec>& flows,
                                   const Scheme& scheme, const SimConfig& sim) {
  Ctx ctx;
  check_topology(topology, ctx);
  check_sim(sim, scheme, ctx);

  int tpi = 0;
  if (scheme.kind == SchemeKind::ReFlex)
    tpi = ticks_per_interval_or_fail(sim, scheme.phases, ctx);

  // Canonical flow order, so the verdict and all downstream behavior are
  // independent of input permutation.
  std::vector<FlowSpec> sorted = flows;
  std::sort(sorted.begin(), sorted.end(),
            [](const FlowSpec& a, const FlowSpec& b) {
              if (a.arrival_time_s != b.arrival_time_s)
                return a.arrival_time_s < b.arrival_time_s;
              return a.flow_id < b.flow_id;
            });

  std::set<FlowId> ids;
  for (const FlowSpec& f : sorted) {
    if (!ids.insert(f.flow_id).second)
      ctx.fail(ValidationCode::DuplicateFlowId, "flow ", f.flow_id,
               ": duplicate id");
    check_flow(f, topology, ctx);
  }

  if (!ctx.errors.empty()) return {std::nullopt, std::move(ctx.errors)};

  Scenario scen;
  scen.topology = topology;
  scen.flows = std::move(sorted);
  scen.scheme = scheme;
  scen.sim = sim;
  scen.ticks_per_interval = tpi;
  scen.flow_routes.reserve(scen.flows.size());
  for (const FlowSpec& f : scen.flows) {
    const auto* path = scen.topology.route(f.src, f.dst);
    std::vector<int> positions;
    positions.reserve(path->size());
    for (LinkId id : *path) positions.push_back(scen.topology.link_index(id));
    scen.flow_routes.push_back(std::move(positions));
  }
  return {std::move(scen), {}};
}

}  // namespace reflexsim
