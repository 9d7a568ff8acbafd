#include "reflexsim/reflex.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace reflexsim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

PrevPhase as_prev(Phase p) {
  switch (p) {
    case Phase::Warmup: return PrevPhase::Warmup;
    case Phase::Measure: return PrevPhase::Measure;
    case Phase::Exploit: return PrevPhase::Exploit;
  }
  return PrevPhase::None;
}

}  // namespace

const char* to_string(Phase p) {
  switch (p) {
    case Phase::Warmup: return "WARMUP";
    case Phase::Measure: return "MEASURE";
    case Phase::Exploit: return "EXPLOIT";
  }
  return "?";
}

Phase determine_phase(int64_t interval_id, const PhaseConfig& cfg) {
  int64_t cycle = cfg.cycle_intervals();
  if (cycle <= 0) throw std::invalid_argument("determine_phase: empty cycle");
  int64_t p = ((interval_id % cycle) + cycle) % cycle;
  if (p < cfg.d_warmup) return Phase::Warmup;
  if (p < cfg.d_warmup + cfg.d_measure) return Phase::Measure;
  return Phase::Exploit;
}

BudgetState BudgetState::init(const FlowSpec& flow) {
  BudgetState b;
  if (flow.r < 1.0 && !flow.size_unbounded())
    b.b_r_bytes = (1.0 - flow.r) * (double)flow.size_bytes;
  return b;
}

AdjustResult adjust_budget(BudgetState& budget, const FlowSpec& flow,
                           std::optional<double> r_fair_bps, double ack_bytes,
                           double elapsed_s) {
  if (!r_fair_bps)
    throw std::logic_error("adjust_budget: no fair-share estimate yet");
  if (!(elapsed_s > 0.0))
    throw std::invalid_argument("adjust_budget: elapsed time must be positive");
  if (ack_bytes < 0.0)
    throw std::invalid_argument("adjust_budget: negative ack");

  double r_fair_Bps = *r_fair_bps / 8.0;
  double r_actual_Bps = ack_bytes / elapsed_s;
  budget.s_sent_bytes += ack_bytes;
  budget.b_alpha_bytes -=
      elapsed_s * (flow.accounting_alpha() * r_fair_Bps - r_actual_Bps);

  AdjustResult out;
  if (budget.b_alpha_bytes < 0.0) {
    // Overdraft spills into the reliability budget as discarded payload.
    double b_r_before = budget.b_r_bytes;
    budget.b_r_bytes += budget.b_alpha_bytes;
    if (budget.b_r_bytes >= 0.0) {
      budget.b_alpha_bytes = 0.0;
    } else {
      budget.b_alpha_bytes = budget.b_r_bytes;
      budget.b_r_bytes = 0.0;
    }
    out.discard_bytes = b_r_before - budget.b_r_bytes;
    budget.s_sent_bytes += out.discard_bytes;
    budget.discarded_bytes += out.discard_bytes;
  }
  return out;
}

ControlTrace controller_update(ControllerState& ctl, BudgetState& budget,
                               const FlowSpec& flow, int64_t interval_id,
                               double ack_bytes, double elapsed_s,
                               const PhaseConfig& cfg) {
  ControlTrace tr;
  tr.interval_id = interval_id;
  tr.upcoming = determine_phase(interval_id, cfg);
  tr.r_fair_bps = kNaN;
  tr.l_potential_bytes = kNaN;

  if (ctl.r_fair_Bps) {
    AdjustResult adj =
        adjust_budget(budget, flow, *ctl.r_fair_Bps * 8.0, ack_bytes, elapsed_s);
    tr.discard_bytes = adj.discard_bytes;
  }

  if (!flow.size_unbounded() &&
      budget.s_sent_bytes >= (double)flow.size_bytes) {
    tr.decision = ControlDecision::Finished;
    tr.b_alpha_bytes = budget.b_alpha_bytes;
    tr.b_r_bytes = budget.b_r_bytes;
    if (ctl.r_fair_Bps) tr.r_fair_bps = *ctl.r_fair_Bps * 8.0;
    return tr;
  }

  // The elapsed interval had phase p_prev; measure traffic feeds the probe
  // once a full cycle boundary has synchronized the estimator.
  if (ctl.p_prev == PrevPhase::Measure && ctl.sync) {
    ctl.d_probe_bytes += ack_bytes;
    ctl.t_probe_s += elapsed_s;
  }

  if (ctl.p_prev == PrevPhase::Exploit && tr.upcoming == Phase::Warmup) {
    ctl.sync = true;
    ctl.i_exploit_low = false;
  }

  if (ctl.p_prev == PrevPhase::Measure && tr.upcoming == Phase::Exploit) {
    if (ctl.sync && ctl.t_probe_s > 0.0) {
      ctl.r_fair_Bps = ctl.d_probe_bytes / ctl.t_probe_s;
      ctl.d_probe_bytes = 0.0;
      ctl.t_probe_s = 0.0;
    }
    if (ctl.r_fair_Bps) {
      double l_potential = flow.accounting_alpha() * *ctl.r_fair_Bps *
                           cfg.d_exploit * cfg.t_int_s;
      ctl.i_exploit_low =
          budget.b_alpha_bytes + budget.b_r_bytes > l_potential;
      tr.decision_boundary = true;
    }
  }

  ctl.p_prev = as_prev(tr.upcoming);
  tr.b_alpha_bytes = budget.b_alpha_bytes;
  tr.b_r_bytes = budget.b_r_bytes;
  if (ctl.r_fair_Bps) {
    tr.r_fair_bps = *ctl.r_fair_Bps * 8.0;
    tr.l_potential_bytes = flow.accounting_alpha() * *ctl.r_fair_Bps *
                           cfg.d_exploit * cfg.t_int_s;
  }
  tr.decision =
      ctl.i_exploit_low ? ControlDecision::Low : ControlDecision::High;
  return tr;
}

std::optional<double> time_to_first_exploit(double alpha,
                                            const PhaseConfig& cfg,
                                            double r_fair_bps) {
  if (!(r_fair_bps > 0.0))
    throw std::invalid_argument("time_to_first_exploit: fair rate must be positive");
  if (alpha < 0.0)
    throw std::invalid_argument("time_to_first_exploit: negative alpha");
  if (alpha >= 1.0) return std::nullopt;

  FlowSpec probe;
  probe.flow_id = 0;
  probe.alpha = alpha;
  probe.r = 1.0;
  probe.size_bytes = kSizeUnbounded;
  probe.kind = FlowKind::Flexible;

  ControllerState ctl;
  BudgetState budget = BudgetState::init(probe);
  const double t = cfg.t_int_s;
  const double ack = r_fair_bps / 8.0 * t;

  // Post-estimate credit per interval is (1 - alpha) * fair, a decision needs
  // d_exploit * alpha * fair, and the estimate itself takes about a cycle and
  // a half, so a few spare cycles bound the search.
  double cycles_needed =
      (cfg.d_exploit * alpha) / ((1.0 - alpha) * cfg.cycle_intervals());
  int64_t limit =
      ((int64_t)std::ceil(cycles_needed) + 5) * cfg.cycle_intervals();
  for (int64_t k = 1; k <= limit; ++k) {
    ControlTrace tr = controller_update(ctl, budget, probe, k, ack, t, cfg);
    if (tr.decision == ControlDecision::Low) return (double)k * t;
  }
  return std::nullopt;
}

double spend_fraction(const PhaseConfig& cfg, int w_high, int w_low,
                      int n_competitors) {
  if (w_high < 0 || w_low < 0 || w_high + w_low <= 0)
    throw std::invalid_argument("spend_fraction: bad class weights");
  if (n_competitors < 0)
    throw std::invalid_argument("spend_fraction: negative competitor count");

  // Unit capacity, one flexible flow against n backlogged regular flows.
  double fair = 1.0 / (n_competitors + 1);
  double low_rate =
      n_competitors == 0 ? 1.0 : (double)w_low / (w_high + w_low);
  double ceded = std::max(0.0, (fair - low_rate) / fair);
  return (double)cfg.d_exploit / cfg.cycle_intervals() * ceded;
}

}  // namespace reflexsim
