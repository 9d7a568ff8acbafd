#pragma once

#include <cstdint>
#include <optional>

#include "reflexsim/types.hpp"

namespace reflexsim {

enum class Phase { Warmup, Measure, Exploit };

const char* to_string(Phase p);

// Phase of interval `interval_id` within the repeating cycle.
Phase determine_phase(int64_t interval_id, const PhaseConfig& cfg);

// Spend ledger, all in bytes. b_alpha holds earned slack against the
// guaranteed alpha-rate; b_r holds the payload the flow may drop outright.
struct BudgetState {
  double b_alpha_bytes = 0.0;
  double b_r_bytes = 0.0;
  double s_sent_bytes = 0.0;      // acknowledged + discarded, once accounted
  double discarded_bytes = 0.0;   // total drained from b_r

  static BudgetState init(const FlowSpec& flow);
};

struct AdjustResult {
  double discard_bytes = 0.0;  // drained from b_r by this update
};

// One accounting step for an elapsed period: credit the flow for running
// above alpha * fair share, debit it below, and spill any overdraft into the
// reliability budget as discarded payload. Throws if no fair-share estimate
// is available yet.
AdjustResult adjust_budget(BudgetState& budget, const FlowSpec& flow,
                           std::optional<double> r_fair_bps, double ack_bytes,
                           double elapsed_s);

enum class PrevPhase { None, Warmup, Measure, Exploit };

struct ControllerState {
  std::optional<double> r_fair_Bps;  // bytes/s; unset until first estimate
  PrevPhase p_prev = PrevPhase::None;
  bool sync = false;                 // seen a full cycle boundary
  double d_probe_bytes = 0.0;
  double t_probe_s = 0.0;
  bool i_exploit_low = false;
};

enum class ControlDecision { High, Low, Finished };

// Everything one update decided, for traces and assertions.
struct ControlTrace {
  int64_t interval_id = 0;
  Phase upcoming = Phase::Warmup;
  ControlDecision decision = ControlDecision::High;
  bool decision_boundary = false;   // measure->exploit with an estimate in hand
  double r_fair_bps = 0.0;          // NaN while unset (bits/s)
  double b_alpha_bytes = 0.0;
  double b_r_bytes = 0.0;
  double l_potential_bytes = 0.0;   // NaN while no estimate
  double discard_bytes = 0.0;
};

// Called once per elapsed interval with the bytes acknowledged during it.
// interval_id indexes the interval that starts now. Probing: the first full
// cycle boundary arms the estimator, each synchronized measure interval feeds
// it, and at every measure->exploit boundary the flow decides whether the
// accumulated budget covers a low-priority exploit phase.
ControlTrace controller_update(ControllerState& ctl, BudgetState& budget,
                               const FlowSpec& flow, int64_t interval_id,
                               double ack_bytes, double elapsed_s,
                               const PhaseConfig& cfg);

// Time from a cycle-aligned start until the first low-priority decision for
// a flow held exactly at fair share, found by driving the controller with an
// idealized feed. Empty when alpha >= 1 (the budget can never cover an
// exploit phase).
std::optional<double> time_to_first_exploit(double alpha,
                                            const PhaseConfig& cfg,
                                            double r_fair_bps);

// Long-run fraction of fair share a flexible flow cedes in steady-state
// competition with n_competitors regular flows on one link, ignoring budget
// limits (alpha = 0 worst case).
double spend_fraction(const PhaseConfig& cfg, int w_high, int w_low,
                      int n_competitors);

}  // namespace reflexsim
