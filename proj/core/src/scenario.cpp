#include "reflexsim/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <string_view>

#include "json.hpp"

namespace reflexsim {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

[[noreturn]] void fail(const std::string& msg) { throw ScenarioError(msg); }

void check_keys(const json& obj, const std::string& ctx,
                std::initializer_list<std::string_view> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (std::string_view a : allowed)
      if (a == it.key()) {
        known = true;
        break;
      }
    if (!known) fail("unknown key \"" + it.key() + "\" in " + ctx);
  }
}

const json& req(const json& obj, const std::string& ctx, const char* key) {
  if (!obj.contains(key)) fail(ctx + ": missing key \"" + key + "\"");
  return obj.at(key);
}

const json& req_object(const json& obj, const std::string& ctx,
                       const char* key) {
  const json& v = req(obj, ctx, key);
  if (!v.is_object()) fail(ctx + "." + key + ": expected an object");
  return v;
}

std::string to_str(const json& v, const std::string& ctx) {
  if (!v.is_string()) fail(ctx + ": expected a string");
  return v.get<std::string>();
}

double to_double(const json& v, const std::string& ctx) {
  if (!v.is_number()) fail(ctx + ": expected a number");
  return v.get<double>();
}

double to_double_or_inf(const json& v, const std::string& ctx) {
  if (v.is_string()) {
    if (v.get<std::string>() == "inf")
      return std::numeric_limits<double>::infinity();
    fail(ctx + ": expected a number or \"inf\"");
  }
  return to_double(v, ctx);
}

uint64_t to_size(const json& v, const std::string& ctx) {
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return kSizeUnbounded;
    fail(ctx + ": expected a byte count or \"inf\"");
  }
  if (v.is_number_unsigned()) return v.get<uint64_t>();
  if (v.is_number_integer()) {
    int64_t n = v.get<int64_t>();
    if (n < 0) fail(ctx + ": negative byte count");
    return (uint64_t)n;
  }
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (d < 0.0 || d > 9.0e18 || d != std::floor(d))
      fail(ctx + ": expected a whole byte count");
    return (uint64_t)llround(d);
  }
  fail(ctx + ": expected a byte count or \"inf\"");
}

int to_int(const json& v, const std::string& ctx) {
  if (!v.is_number_integer() && !v.is_number_unsigned())
    fail(ctx + ": expected an integer");
  return v.get<int>();
}

uint64_t to_uint64(const json& v, const std::string& ctx) {
  if (v.is_number_unsigned()) return v.get<uint64_t>();
  if (v.is_number_integer()) {
    int64_t n = v.get<int64_t>();
    if (n < 0) fail(ctx + ": expected a non-negative integer");
    return (uint64_t)n;
  }
  fail(ctx + ": expected a non-negative integer");
}

Topology single_tor(int servers, double capacity_bps, double efficiency,
                    int weight_high, int weight_low) {
  if (servers < 2) fail("topology.servers: need at least 2");
  Topology topo;
  topo.nodes.push_back("tor");
  int width = servers >= 100 ? 3 : 2;
  std::vector<NodeId> names(servers);
  for (int i = 0; i < servers; ++i) {
    char buf[16];
    snprintf(buf, sizeof(buf), "s%0*d", width, i + 1);
    names[i] = buf;
    topo.nodes.push_back(names[i]);
    LinkSpec up;
    up.link_id = 2 * i;
    up.tail = names[i];
    up.head = "tor";
    up.capacity_bps = capacity_bps;
    up.efficiency = efficiency;
    up.weight_high = weight_high;
    up.weight_low = weight_low;
    LinkSpec down = up;
    down.link_id = 2 * i + 1;
    down.tail = "tor";
    down.head = names[i];
    topo.links.push_back(up);
    topo.links.push_back(down);
  }
  for (int i = 0; i < servers; ++i)
    for (int j = 0; j < servers; ++j) {
      if (i == j) continue;
      topo.routes[{names[i], names[j]}] = {2 * i, 2 * j + 1};
    }
  return topo;
}

Topology parse_topology(const json& t) {
  if (!t.is_object()) fail("topology: expected an object");
  if (t.contains("preset")) {
    check_keys(t, "topology",
               {"preset", "servers", "capacity_bps", "efficiency",
                "weight_high", "weight_low"});
    std::string preset = to_str(t.at("preset"), "topology.preset");
    if (preset != "single_tor")
      fail("topology.preset: unknown preset \"" + preset + "\"");
    int servers = to_int(req(t, "topology", "servers"), "topology.servers");
    double cap = to_double(req(t, "topology", "capacity_bps"),
                           "topology.capacity_bps");
    double eff = t.contains("efficiency")
                     ? to_double(t.at("efficiency"), "topology.efficiency")
                     : 0.96;
    int wh = t.contains("weight_high")
                 ? to_int(t.at("weight_high"), "topology.weight_high")
                 : 9;
    int wl = t.contains("weight_low")
                 ? to_int(t.at("weight_low"), "topology.weight_low")
                 : 1;
    return single_tor(servers, cap, eff, wh, wl);
  }

  check_keys(t, "topology", {"nodes", "links", "routes"});
  Topology topo;
  const json& nodes = req(t, "topology", "nodes");
  if (!nodes.is_array()) fail("topology.nodes: expected an array");
  for (const json& n : nodes)
    topo.nodes.push_back(to_str(n, "topology.nodes[]"));

  const json& links = req(t, "topology", "links");
  if (!links.is_array()) fail("topology.links: expected an array");
  for (size_t i = 0; i < links.size(); ++i) {
    std::string ctx = "topology.links[" + std::to_string(i) + "]";
    const json& l = links[i];
    if (!l.is_object()) fail(ctx + ": expected an object");
    check_keys(l, ctx,
               {"link_id", "tail", "head", "capacity_bps", "efficiency",
                "weight_high", "weight_low"});
    LinkSpec spec;
    spec.link_id = to_int(req(l, ctx, "link_id"), ctx + ".link_id");
    spec.tail = to_str(req(l, ctx, "tail"), ctx + ".tail");
    spec.head = to_str(req(l, ctx, "head"), ctx + ".head");
    spec.capacity_bps =
        to_double(req(l, ctx, "capacity_bps"), ctx + ".capacity_bps");
    if (l.contains("efficiency"))
      spec.efficiency = to_double(l.at("efficiency"), ctx + ".efficiency");
    if (l.contains("weight_high"))
      spec.weight_high = to_int(l.at("weight_high"), ctx + ".weight_high");
    if (l.contains("weight_low"))
      spec.weight_low = to_int(l.at("weight_low"), ctx + ".weight_low");
    topo.links.push_back(std::move(spec));
  }

  const json& routes = req(t, "topology", "routes");
  if (!routes.is_array()) fail("topology.routes: expected an array");
  for (size_t i = 0; i < routes.size(); ++i) {
    std::string ctx = "topology.routes[" + std::to_string(i) + "]";
    const json& r = routes[i];
    if (!r.is_object()) fail(ctx + ": expected an object");
    check_keys(r, ctx, {"src", "dst", "links"});
    NodeId src = to_str(req(r, ctx, "src"), ctx + ".src");
    NodeId dst = to_str(req(r, ctx, "dst"), ctx + ".dst");
    const json& hop = req(r, ctx, "links");
    if (!hop.is_array()) fail(ctx + ".links: expected an array");
    std::vector<LinkId> ids;
    for (const json& h : hop)
      ids.push_back(to_int(h, ctx + ".links[]"));
    if (topo.routes.count({src, dst}))
      fail(ctx + ": duplicate route " + src + " -> " + dst);
    topo.routes[{src, dst}] = std::move(ids);
  }
  return topo;
}

ArrivalProcess parse_workload(const json& w, const std::string& ctx,
                              const Topology& topo, const fs::path& base_dir) {
  if (!w.is_object()) fail(ctx + ": expected an object");
  check_keys(w, ctx, {"arrivals", "size", "alpha", "r", "endpoints"});
  ArrivalProcess p;

  const json& a = req_object(w, ctx, "arrivals");
  std::string akind = to_str(req(a, ctx + ".arrivals", "kind"),
                             ctx + ".arrivals.kind");
  if (akind == "poisson") {
    check_keys(a, ctx + ".arrivals", {"kind", "rate_per_s"});
    p.arrival_kind = ArrivalProcess::ArrivalKind::Poisson;
    p.rate_per_s = to_double(req(a, ctx + ".arrivals", "rate_per_s"),
                             ctx + ".arrivals.rate_per_s");
  } else if (akind == "fixed") {
    check_keys(a, ctx + ".arrivals", {"kind", "times_s"});
    p.arrival_kind = ArrivalProcess::ArrivalKind::FixedTimes;
    const json& times = req(a, ctx + ".arrivals", "times_s");
    if (!times.is_array()) fail(ctx + ".arrivals.times_s: expected an array");
    for (const json& t : times)
      p.times_s.push_back(to_double(t, ctx + ".arrivals.times_s[]"));
  } else {
    fail(ctx + ".arrivals.kind: expected \"poisson\" or \"fixed\"");
  }

  const json& sz = req_object(w, ctx, "size");
  std::string skind = to_str(req(sz, ctx + ".size", "kind"),
                             ctx + ".size.kind");
  if (skind == "constant") {
    check_keys(sz, ctx + ".size", {"kind", "bytes"});
    p.size_kind = ArrivalProcess::SizeKind::Constant;
    p.constant_bytes =
        to_size(req(sz, ctx + ".size", "bytes"), ctx + ".size.bytes");
  } else if (skind == "cdf_file") {
    check_keys(sz, ctx + ".size", {"kind", "path"});
    p.size_kind = ArrivalProcess::SizeKind::EmpiricalCdf;
    fs::path rel = to_str(req(sz, ctx + ".size", "path"), ctx + ".size.path");
    fs::path file = rel.is_absolute() ? rel : base_dir / rel;
    try {
      p.cdf = SizeCdfTable::load(file);
    } catch (const std::runtime_error& e) {
      fail(ctx + ".size.path: " + e.what());
    }
  } else {
    fail(ctx + ".size.kind: expected \"constant\" or \"cdf_file\"");
  }

  if (w.contains("alpha")) p.alpha = to_double_or_inf(w.at("alpha"), ctx + ".alpha");
  if (w.contains("r")) p.r = to_double(w.at("r"), ctx + ".r");

  const json& ep = req_object(w, ctx, "endpoints");
  std::string ekind = to_str(req(ep, ctx + ".endpoints", "kind"),
                             ctx + ".endpoints.kind");
  if (ekind == "fixed") {
    check_keys(ep, ctx + ".endpoints", {"kind", "src", "dst"});
    p.endpoint_kind = ArrivalProcess::EndpointKind::Fixed;
    p.src = to_str(req(ep, ctx + ".endpoints", "src"), ctx + ".endpoints.src");
    p.dst = to_str(req(ep, ctx + ".endpoints", "dst"), ctx + ".endpoints.dst");
  } else if (ekind == "all_pairs_uniform") {
    check_keys(ep, ctx + ".endpoints", {"kind"});
    p.endpoint_kind = ArrivalProcess::EndpointKind::AllPairsUniform;
    p.candidates = topo.routed_pairs();
    if (p.candidates.empty())
      fail(ctx + ".endpoints: topology has no routed pairs");
  } else {
    fail(ctx + ".endpoints.kind: expected \"fixed\" or \"all_pairs_uniform\"");
  }
  return p;
}

}  // namespace

ScenarioDoc parse_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open scenario file: " + path.string());
  json root;
  try {
    root = json::parse(in, nullptr, true, true);  // allow // comments
  } catch (const json::parse_error& e) {
    fail("scenario " + path.string() + ": " + e.what());
  }
  if (!root.is_object()) fail("scenario " + path.string() + ": expected an object");
  check_keys(root, "scenario",
             {"topology", "workloads", "scheme", "reflex", "sim", "outputs"});

  ScenarioDoc doc;
  doc.topology = parse_topology(req(root, "scenario", "topology"));

  if (root.contains("reflex")) {
    const json& rf = root.at("reflex");
    if (!rf.is_object()) fail("reflex: expected an object");
    check_keys(rf, "reflex", {"t_int_s", "d_warmup", "d_measure", "d_exploit"});
    doc.has_reflex_section = true;
    if (rf.contains("t_int_s"))
      doc.phases.t_int_s = to_double(rf.at("t_int_s"), "reflex.t_int_s");
    if (rf.contains("d_warmup"))
      doc.phases.d_warmup = to_int(rf.at("d_warmup"), "reflex.d_warmup");
    if (rf.contains("d_measure"))
      doc.phases.d_measure = to_int(rf.at("d_measure"), "reflex.d_measure");
    if (rf.contains("d_exploit"))
      doc.phases.d_exploit = to_int(rf.at("d_exploit"), "reflex.d_exploit");
  }

  doc.scheme = parse_scheme_tag(
      to_str(req(root, "scenario", "scheme"), "scheme"), doc);

  const json& wls = req(root, "scenario", "workloads");
  if (!wls.is_array() || wls.empty())
    fail("workloads: expected a non-empty array");
  for (size_t i = 0; i < wls.size(); ++i)
    doc.workloads.push_back(parse_workload(
        wls[i], "workloads[" + std::to_string(i) + "]", doc.topology,
        path.has_parent_path() ? path.parent_path() : fs::path(".")));

  const json& sim = req_object(root, "scenario", "sim");
  check_keys(sim, "sim",
             {"tick_dt_s", "duration_s", "warmup_window_s",
              "cooldown_window_s", "conv_tau_s", "seed"});
  doc.sim.duration_s =
      to_double(req(sim, "sim", "duration_s"), "sim.duration_s");
  if (sim.contains("tick_dt_s"))
    doc.sim.tick_dt_s = to_double(sim.at("tick_dt_s"), "sim.tick_dt_s");
  if (sim.contains("warmup_window_s"))
    doc.sim.warmup_window_s =
        to_double(sim.at("warmup_window_s"), "sim.warmup_window_s");
  if (sim.contains("cooldown_window_s"))
    doc.sim.cooldown_window_s =
        to_double(sim.at("cooldown_window_s"), "sim.cooldown_window_s");
  if (sim.contains("conv_tau_s"))
    doc.sim.conv_tau_s = to_double(sim.at("conv_tau_s"), "sim.conv_tau_s");
  if (sim.contains("seed"))
    doc.sim.seed = to_uint64(sim.at("seed"), "sim.seed");

  if (root.contains("outputs")) {
    const json& out = root.at("outputs");
    if (!out.is_object()) fail("outputs: expected an object");
    check_keys(out, "outputs", {"timeseries_decimation"});
    if (out.contains("timeseries_decimation")) {
      int d = to_int(out.at("timeseries_decimation"),
                     "outputs.timeseries_decimation");
      if (d < 0) fail("outputs.timeseries_decimation: must be >= 0");
      doc.outputs.timeseries_decimation = d;
    }
  }
  return doc;
}

void apply_overrides(ScenarioDoc& doc, const ScenarioOverrides& ov) {
  if (ov.seed) doc.sim.seed = *ov.seed;
  if (ov.efficiency)
    for (LinkSpec& l : doc.topology.links) l.efficiency = *ov.efficiency;
  if (ov.conv_tau_s) doc.sim.conv_tau_s = *ov.conv_tau_s;
  if (ov.tick_dt_s) doc.sim.tick_dt_s = *ov.tick_dt_s;
}

std::optional<SweepParam> sweep_param_from_string(const std::string& name) {
  if (name == "alpha") return SweepParam::Alpha;
  if (name == "r") return SweepParam::R;
  if (name == "D_exploit") return SweepParam::DExploit;
  if (name == "T_int") return SweepParam::TInt;
  return std::nullopt;
}

const char* to_string(SweepParam p) {
  switch (p) {
    case SweepParam::Alpha: return "alpha";
    case SweepParam::R: return "r";
    case SweepParam::DExploit: return "D_exploit";
    case SweepParam::TInt: return "T_int";
  }
  return "?";
}

void apply_sweep_param(ScenarioDoc& doc, SweepParam param, double value) {
  if (param == SweepParam::Alpha || param == SweepParam::R) {
    int touched = 0;
    for (ArrivalProcess& w : doc.workloads) {
      if (FlowSpec::kind_for(w.alpha, w.r) != FlowKind::Flexible) continue;
      if (param == SweepParam::Alpha)
        w.alpha = value;
      else
        w.r = value;
      ++touched;
    }
    if (touched == 0)
      fail(std::string("sweep ") + to_string(param) +
           ": scenario has no flexible workload template");
    return;
  }
  // Cycle parameters only make sense with the reflex scheme.
  if (doc.scheme.kind != SchemeKind::ReFlex)
    fail(std::string("sweep ") + to_string(param) +
         ": scenario scheme is not reflex");
  if (param == SweepParam::DExploit) {
    int d = (int)llround(value);
    if (d <= 0 || (double)d != value)
      fail("sweep D_exploit: expected a positive integer value");
    doc.phases.d_exploit = d;
  } else {
    if (!(value > 0.0)) fail("sweep T_int: expected a positive value");
    doc.phases.t_int_s = value;
  }
  doc.scheme.phases = doc.phases;
}

void apply_scheme(ScenarioDoc& doc, const Scheme& scheme) {
  if (scheme.kind == SchemeKind::ReFlex && !doc.has_reflex_section)
    fail("scheme \"reflex\" needs a reflex section in the scenario");
  doc.scheme = scheme;
}

Scheme parse_scheme_tag(const std::string& tag, const ScenarioDoc& doc) {
  if (tag == "baseline") return Scheme::baseline();
  if (tag == "absolute") return Scheme::absolute_priority();
  if (tag == "reflex") {
    if (!doc.has_reflex_section)
      fail("scheme \"reflex\" needs a reflex section in the scenario");
    return Scheme::reflex(doc.phases);
  }
  const std::string prefix = "weighted:";
  if (tag.rfind(prefix, 0) == 0) {
    std::string rest = tag.substr(prefix.size());
    size_t colon = rest.find(':');
    auto bad = [&]() {
      fail("bad scheme tag \"" + tag + "\": expected weighted:W_HIGH:W_LOW");
    };
    if (colon == std::string::npos) bad();
    int wh = 0, wl = 0;
    auto parse_int = [&](const std::string& s, int& out) {
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
      return ec == std::errc() && p == s.data() + s.size();
    };
    if (!parse_int(rest.substr(0, colon), wh) ||
        !parse_int(rest.substr(colon + 1), wl))
      bad();
    if (wh < 0 || wl < 0 || wh + wl <= 0)
      fail("bad scheme tag \"" + tag + "\": weights must be non-negative and not both zero");
    return Scheme::weighted_priority(wh, wl);
  }
  fail("unknown scheme tag \"" + tag + "\"");
}

std::string scheme_tag(const Scheme& scheme) {
  switch (scheme.kind) {
    case SchemeKind::Baseline: return "baseline";
    case SchemeKind::AbsolutePriority: return "absolute";
    case SchemeKind::WeightedPriority:
      return "weighted:" + std::to_string(scheme.weight_high) + ":" +
             std::to_string(scheme.weight_low);
    case SchemeKind::ReFlex: return "reflex";
  }
  return "?";
}

Scenario build_scenario(const ScenarioDoc& doc, uint64_t seed) {
  if (!(doc.sim.duration_s > 0.0)) fail("sim.duration_s must be positive");
  std::vector<FlowSpec> flows;
  struct Tag {
    double arrival;
    size_t workload;
    FlowId seq;
    size_t pos;
  };
  std::vector<Tag> order;
  for (size_t i = 0; i < doc.workloads.size(); ++i) {
    std::vector<FlowSpec> part =
        generate(doc.workloads[i], doc.sim.duration_s, child_seed(seed, i));
    for (FlowSpec& f : part) {
      order.push_back({f.arrival_time_s, i, f.flow_id, flows.size()});
      flows.push_back(std::move(f));
    }
  }
  std::sort(order.begin(), order.end(), [](const Tag& a, const Tag& b) {
    if (a.arrival != b.arrival) return a.arrival < b.arrival;
    if (a.workload != b.workload) return a.workload < b.workload;
    return a.seq < b.seq;
  });
  std::vector<FlowSpec> merged;
  merged.reserve(flows.size());
  for (size_t i = 0; i < order.size(); ++i) {
    FlowSpec f = std::move(flows[order[i].pos]);
    f.flow_id = (FlowId)i;
    merged.push_back(std::move(f));
  }

  SimConfig sim = doc.sim;
  sim.seed = seed;
  ValidationResult res =
      validate_scenario(doc.topology, merged, doc.scheme, sim);
  if (!res.ok()) {
    std::string msg = "scenario rejected: ";
    for (size_t i = 0; i < res.errors.size(); ++i) {
      if (i) msg += "; ";
      msg += res.errors[i].message;
    }
    fail(msg);
  }
  return std::move(*res.scenario);
}

}  // namespace reflexsim
