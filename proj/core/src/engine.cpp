#include "reflexsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "reflexsim/allocator.hpp"

namespace reflexsim {

double FlowRuntime::remaining_payload_bytes() const {
  if (spec->size_unbounded()) return std::numeric_limits<double>::infinity();
  return std::max(0.0,
                  (double)spec->size_bytes - delivered_bytes - discarded_bytes);
}

Engine::Engine(const Scenario& scenario, RunOptions options)
    : scen_(&scenario), opts_(options), rng_(scenario.sim.seed) {
  dt_s_ = scen_->sim.tick_dt_s;
  n_ticks_ = llround(scen_->sim.duration_s / dt_s_);
  if ((double)n_ticks_ * dt_s_ < scen_->sim.duration_s * (1.0 - 1e-12))
    n_ticks_ = (int64_t)std::ceil(scen_->sim.duration_s / dt_s_);
  ticks_per_interval_ =
      scen_->scheme.kind == SchemeKind::ReFlex ? scen_->ticks_per_interval : 0;
  rise_factor_ = scen_->sim.conv_tau_s > 0.0
                     ? 1.0 - std::exp(-dt_s_ / scen_->sim.conv_tau_s)
                     : 1.0;

  flows_.resize(scen_->flows.size());
  for (size_t i = 0; i < flows_.size(); ++i) {
    FlowRuntime& f = flows_[i];
    f.spec = &scen_->flows[i];
    // Static priorities; ReFlex flexible flows start high and are then
    // controller driven.
    bool low = f.spec->flexible() &&
               (scen_->scheme.kind == SchemeKind::AbsolutePriority ||
                scen_->scheme.kind == SchemeKind::WeightedPriority);
    f.priority = low ? Priority::Low : Priority::High;
  }
}

bool Engine::done() const {
  return tick_ >= n_ticks_ || finished_ == (int)flows_.size();
}

double Engine::clock_s() const { return (double)tick_ * dt_s_; }

void Engine::process_interval_boundary(double now_s) {
  int64_t interval_id = tick_ / ticks_per_interval_;
  std::vector<int> snapshot = active_;
  for (int idx : snapshot) {
    FlowRuntime& f = flows_[idx];
    if (!f.spec->flexible()) continue;
    double elapsed = now_s - f.ckpt_time_s;
    if (!(elapsed > 0.0)) continue;
    double ack = f.delivered_bytes - f.ckpt_delivered_bytes;
    ControlTrace tr = controller_update(f.controller, f.budget, *f.spec,
                                        interval_id, ack, elapsed,
                                        scen_->scheme.phases);
    f.ckpt_time_s = now_s;
    f.ckpt_delivered_bytes = f.delivered_bytes;
    if (tr.discard_bytes > 0.0) {
      // The controller may drain more budget than payload is left; the
      // engine ledger never discards bytes the flow does not have.
      double clamped = std::min(tr.discard_bytes, f.remaining_payload_bytes());
      f.discarded_bytes += clamped;
    }
    if (opts_.record_decisions)
      decisions_.push_back({f.spec->flow_id, now_s, tr});
    if (f.remaining_payload_bytes() <= 0.0) {
      finish_flow(idx, now_s);
      continue;
    }
    if (tr.decision == ControlDecision::Finished) continue;
    Priority want = tr.decision == ControlDecision::Low ? Priority::Low
                                                        : Priority::High;
    if (want != f.priority) {
      f.priority = want;
      ++f.priority_switches;
      realloc_needed_ = true;
    }
  }
}

void Engine::activate_arrivals(double now_s) {
  double cutoff = now_s + dt_s_ * 1e-9;
  while (next_pending_ < flows_.size() &&
         scen_->flows[next_pending_].arrival_time_s <= cutoff) {
    int idx = (int)next_pending_++;
    FlowRuntime& f = flows_[idx];
    f.status = FlowRuntime::Status::Active;
    f.budget = BudgetState::init(*f.spec);
    f.ckpt_time_s = now_s;
    f.ckpt_delivered_bytes = 0.0;
    active_.push_back(idx);
    realloc_needed_ = true;
  }
}

void Engine::reallocate() {
  std::vector<ActiveFlow> actives;
  actives.reserve(active_.size());
  for (int idx : active_)
    actives.push_back({flows_[idx].spec->flow_id,
                       std::span<const int>(scen_->flow_routes[idx]),
                       flows_[idx].priority});
  AllocationResult res = allocate(scen_->topology, actives, scen_->scheme);
  if (!res.converged && nonconverged_logged_ < 5) {
    log_.push_back("allocation fixed point hit its iteration cap at tick " +
                   std::to_string(tick_));
    ++nonconverged_logged_;
  }
  for (int idx : active_) {
    FlowRuntime& f = flows_[idx];
    f.target_rate_bps = res.rate_bps.at(f.spec->flow_id);
    // Drops bind immediately; rises chase the target below.
    if (f.current_rate_bps > f.target_rate_bps)
      f.current_rate_bps = f.target_rate_bps;
  }
  realloc_needed_ = false;
}

void Engine::finish_flow(int idx, double when_s) {
  FlowRuntime& f = flows_[idx];
  f.status = FlowRuntime::Status::Finished;
  f.completion_time_s = when_s;
  f.current_rate_bps = 0.0;
  f.target_rate_bps = 0.0;
  active_.erase(std::find(active_.begin(), active_.end(), idx));
  ++finished_;
  realloc_needed_ = true;
}

void Engine::emit_timeseries(double now_s) {
  for (int idx : active_) {
    const FlowRuntime& f = flows_[idx];
    TimePoint tp;
    tp.time_s = now_s;
    tp.flow_id = f.spec->flow_id;
    tp.rate_bps = f.current_rate_bps;
    tp.priority = f.priority;
    if (scen_->scheme.kind == SchemeKind::ReFlex && f.spec->flexible()) {
      tp.b_alpha_bytes = f.budget.b_alpha_bytes;
      tp.b_r_bytes = f.budget.b_r_bytes;
      if (f.controller.r_fair_Bps) tp.r_fair_bps = *f.controller.r_fair_Bps * 8.0;
    }
    series_.push_back(tp);
  }
}

void Engine::step() {
  double now = clock_s();
  if (ticks_per_interval_ > 0 && tick_ > 0 &&
      tick_ % ticks_per_interval_ == 0)
    process_interval_boundary(now);
  activate_arrivals(now);
  if (realloc_needed_) reallocate();

  for (int idx : active_) {
    FlowRuntime& f = flows_[idx];
    if (f.current_rate_bps < f.target_rate_bps) {
      f.current_rate_bps +=
          (f.target_rate_bps - f.current_rate_bps) * rise_factor_;
      if (f.target_rate_bps - f.current_rate_bps <= 1e-9 * f.target_rate_bps)
        f.current_rate_bps = f.target_rate_bps;
    } else {
      f.current_rate_bps = f.target_rate_bps;
    }
  }

  if (opts_.timeseries_decimation > 0 &&
      tick_ % opts_.timeseries_decimation == 0)
    emit_timeseries(now);

  std::vector<std::pair<int, double>> completions;
  for (int idx : active_) {
    FlowRuntime& f = flows_[idx];
    if (f.current_rate_bps <= 0.0) continue;
    double bytes = f.current_rate_bps * dt_s_ / 8.0;
    double remaining = f.remaining_payload_bytes();
    if (bytes >= remaining) {
      f.delivered_bytes += remaining;
      completions.emplace_back(idx,
                               now + remaining * 8.0 / f.current_rate_bps);
    } else {
      f.delivered_bytes += bytes;
    }
  }
  for (auto& [idx, when] : completions) finish_flow(idx, when);

  ++tick_;
}

RunResult Engine::result() const {
  RunResult out;
  double end_s = clock_s();
  out.records.reserve(flows_.size());
  for (const FlowRuntime& f : flows_) {
    FlowRecord rec;
    rec.flow_id = f.spec->flow_id;
    rec.kind = f.spec->kind;
    rec.size_bytes = f.spec->size_bytes;
    rec.arrival_time_s = f.spec->arrival_time_s;
    rec.delivered_bytes = f.delivered_bytes;
    rec.discarded_bytes = f.discarded_bytes;
    rec.priority_switches = f.priority_switches;
    rec.alpha = f.spec->alpha;
    rec.r = f.spec->r;
    if (f.status == FlowRuntime::Status::Finished) {
      rec.completion_time_s = f.completion_time_s;
      rec.fct_s = f.completion_time_s - f.spec->arrival_time_s;
      if (*rec.fct_s > 0.0)
        rec.mean_rate_bps = f.delivered_bytes * 8.0 / *rec.fct_s;
    } else {
      double span = end_s - f.spec->arrival_time_s;
      if (span > 0.0) rec.mean_rate_bps = f.delivered_bytes * 8.0 / span;
    }
    out.records.push_back(std::move(rec));
  }
  std::sort(out.records.begin(), out.records.end(),
            [](const FlowRecord& a, const FlowRecord& b) {
              return a.flow_id < b.flow_id;
            });
  out.timeseries = series_;
  out.decisions = decisions_;
  out.event_log = log_;
  return out;
}

RunResult run(const Scenario& scenario, const RunOptions& options) {
  Engine engine(scenario, options);
  while (!engine.done()) engine.step();
  return engine.result();
}

}  // namespace reflexsim
