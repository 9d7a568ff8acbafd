#include "reflexsim/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace reflexsim {

namespace {

constexpr int kMaxIterations = 100;
constexpr double kSplitTolerance = 1e-6;  // relative to link capacity

}  // namespace

std::vector<double> maxmin_single_class(const std::vector<double>& capacity_bps,
                                        const std::vector<MaxminFlow>& flows) {
  const int n_links = (int)capacity_bps.size();
  const int n_flows = (int)flows.size();
  for (const MaxminFlow& f : flows) {
    if (f.links.empty())
      throw std::invalid_argument("maxmin_single_class: flow " +
                                  std::to_string(f.flow_id) +
                                  " has an empty route");
    for (int l : f.links)
      if (l < 0 || l >= n_links)
        throw std::invalid_argument(
            "maxmin_single_class: link position out of range");
  }

  std::vector<double> residual = capacity_bps;
  std::vector<int> unfrozen(n_links, 0);
  std::vector<bool> frozen(n_flows, false);
  std::vector<double> rate(n_flows, 0.0);
  for (const MaxminFlow& f : flows)
    for (int l : f.links) ++unfrozen[l];

  int remaining = n_flows;
  while (remaining > 0) {
    // Most constrained link; ties break toward the lowest position.
    int best = -1;
    double best_q = std::numeric_limits<double>::infinity();
    for (int l = 0; l < n_links; ++l) {
      if (unfrozen[l] == 0) continue;
      double q = std::max(0.0, residual[l]) / unfrozen[l];
      if (q < best_q) {
        best_q = q;
        best = l;
      }
    }
    for (int i = 0; i < n_flows; ++i) {
      if (frozen[i]) continue;
      const MaxminFlow& f = flows[i];
      if (std::find(f.links.begin(), f.links.end(), best) == f.links.end())
        continue;
      frozen[i] = true;
      rate[i] = best_q;
      --remaining;
      for (int l : f.links) {
        residual[l] -= best_q;
        --unfrozen[l];
      }
    }
  }
  return rate;
}

std::pair<double, double> split_class_capacity(double effective_bps, int w_high,
                                               int w_low, bool high_present,
                                               bool low_present,
                                               double high_takeup_bps,
                                               double low_takeup_bps) {
  if (!low_present) return {effective_bps, 0.0};
  if (!high_present) return {0.0, effective_bps};
  double total = w_high + w_low;
  double share_high = total > 0 ? effective_bps * w_high / total : 0.0;
  double share_low = effective_bps - share_high;
  // Capacity a class leaves on the table is lent to the other one.
  double slack_high = std::max(0.0, share_high - high_takeup_bps);
  double slack_low = std::max(0.0, share_low - low_takeup_bps);
  return {share_high - slack_high + slack_low,
          share_low - slack_low + slack_high};
}

std::pair<double, double> split_link_capacity(const LinkSpec& link,
                                              bool high_present,
                                              bool low_present,
                                              double high_takeup_bps,
                                              double low_takeup_bps) {
  return split_class_capacity(link.effective_capacity_bps(), link.weight_high,
                              link.weight_low, high_present, low_present,
                              high_takeup_bps, low_takeup_bps);
}

AllocationResult allocate(const Topology& topology,
                          const std::vector<ActiveFlow>& flows,
                          const Scheme& scheme, ClassDemandView* view) {
  const int n_links = (int)topology.links.size();
  AllocationResult out;
  if (view) {
    view->per_link.assign(n_links, {});
  }
  if (flows.empty()) return out;

  // Sort by flow id for reproducible processing.
  std::vector<const ActiveFlow*> ordered;
  ordered.reserve(flows.size());
  for (const ActiveFlow& f : flows) ordered.push_back(&f);
  std::sort(ordered.begin(), ordered.end(),
            [](const ActiveFlow* a, const ActiveFlow* b) {
              return a->flow_id < b->flow_id;
            });

  std::vector<double> eff(n_links);
  for (int l = 0; l < n_links; ++l)
    eff[l] = topology.links[l].effective_capacity_bps();

  auto fill_view = [&](const std::vector<double>& c_high,
                       const std::vector<double>& c_low) {
    if (!view) return;
    for (int l = 0; l < n_links; ++l) {
      view->per_link[l].c_high_bps = c_high[l];
      view->per_link[l].c_low_bps = c_low[l];
    }
    for (const ActiveFlow* f : ordered)
      for (int l : f->route)
        (f->priority == Priority::High ? view->per_link[l].high_flows
                                       : view->per_link[l].low_flows)
            .push_back(f->flow_id);
  };

  if (scheme.kind == SchemeKind::Baseline) {
    // Single class over the full effective capacity.
    std::vector<MaxminFlow> mm;
    mm.reserve(ordered.size());
    for (const ActiveFlow* f : ordered)
      mm.push_back({f->flow_id, {f->route.begin(), f->route.end()}});
    std::vector<double> rates = maxmin_single_class(eff, mm);
    for (size_t i = 0; i < mm.size(); ++i) out.rate_bps[mm[i].flow_id] = rates[i];
    out.iterations_used = 1;
    fill_view(eff, std::vector<double>(n_links, 0.0));
    return out;
  }

  std::vector<MaxminFlow> high, low;
  for (const ActiveFlow* f : ordered) {
    MaxminFlow mm{f->flow_id, {f->route.begin(), f->route.end()}};
    (f->priority == Priority::High ? high : low).push_back(std::move(mm));
  }
  std::vector<bool> high_present(n_links, false), low_present(n_links, false);
  for (const MaxminFlow& f : high)
    for (int l : f.links) high_present[l] = true;
  for (const MaxminFlow& f : low)
    for (int l : f.links) low_present[l] = true;

  const bool absolute = scheme.kind == SchemeKind::AbsolutePriority;
  auto link_weights = [&](int l) -> std::pair<int, int> {
    if (scheme.kind == SchemeKind::WeightedPriority)
      return {scheme.weight_high, scheme.weight_low};
    return {topology.links[l].weight_high, topology.links[l].weight_low};
  };

  // Start from full-backlog splits, then iterate: allocate per class on the
  // virtual capacities, measure per-link takeup, re-split with lending.
  std::vector<double> c_high(n_links), c_low(n_links);
  for (int l = 0; l < n_links; ++l) {
    if (absolute) {
      c_high[l] = eff[l];
      c_low[l] = (low_present[l] && !high_present[l]) ? eff[l] : 0.0;
    } else {
      auto [wh, wl] = link_weights(l);
      auto big = std::numeric_limits<double>::infinity();
      std::tie(c_high[l], c_low[l]) = split_class_capacity(
          eff[l], wh, wl, high_present[l], low_present[l], big, big);
    }
  }

  std::vector<double> high_rates, low_rates;
  bool converged = false;
  int iterations = 0;
  while (iterations < kMaxIterations) {
    ++iterations;
    high_rates = maxmin_single_class(c_high, high);
    low_rates = maxmin_single_class(c_low, low);

    std::vector<double> take_high(n_links, 0.0), take_low(n_links, 0.0);
    for (size_t i = 0; i < high.size(); ++i)
      for (int l : high[i].links) take_high[l] += high_rates[i];
    for (size_t i = 0; i < low.size(); ++i)
      for (int l : low[i].links) take_low[l] += low_rates[i];

    double worst = 0.0;
    for (int l = 0; l < n_links; ++l) {
      double nh, nl;
      if (absolute) {
        nh = eff[l];
        nl = low_present[l] ? std::max(0.0, eff[l] - take_high[l]) : 0.0;
      } else {
        auto [wh, wl] = link_weights(l);
        std::tie(nh, nl) =
            split_class_capacity(eff[l], wh, wl, high_present[l],
                                 low_present[l], take_high[l], take_low[l]);
      }
      worst = std::max(worst, std::fabs(nh - c_high[l]) / eff[l]);
      worst = std::max(worst, std::fabs(nl - c_low[l]) / eff[l]);
      c_high[l] = nh;
      c_low[l] = nl;
    }
    if (worst < kSplitTolerance) {
      converged = true;
      break;
    }
  }

  for (size_t i = 0; i < high.size(); ++i)
    out.rate_bps[high[i].flow_id] = high_rates[i];
  for (size_t i = 0; i < low.size(); ++i)
    out.rate_bps[low[i].flow_id] = low_rates[i];
  out.iterations_used = iterations;
  out.converged = converged;
  fill_view(c_high, c_low);
  return out;
}

}  // namespace reflexsim
