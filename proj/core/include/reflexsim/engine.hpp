#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "reflexsim/metrics.hpp"
#include "reflexsim/reflex.hpp"
#include "reflexsim/validate.hpp"

namespace reflexsim {

struct FlowRuntime {
  enum class Status { Pending, Active, Finished };

  const FlowSpec* spec = nullptr;
  Status status = Status::Pending;
  Priority priority = Priority::High;
  double current_rate_bps = 0.0;
  double target_rate_bps = 0.0;
  double delivered_bytes = 0.0;
  double discarded_bytes = 0.0;
  double completion_time_s = 0.0;  // valid once Finished
  int priority_switches = 0;
  // Bytes/time checkpoint of the last controller update.
  double ckpt_time_s = 0.0;
  double ckpt_delivered_bytes = 0.0;
  BudgetState budget;
  ControllerState controller;

  double remaining_payload_bytes() const;
};

struct TimePoint {
  double time_s = 0.0;
  FlowId flow_id = 0;
  double rate_bps = 0.0;
  Priority priority = Priority::High;
  std::optional<double> b_alpha_bytes;
  std::optional<double> b_r_bytes;
  std::optional<double> r_fair_bps;
};

struct DecisionRow {
  FlowId flow_id = 0;
  double time_s = 0.0;
  ControlTrace trace;
};

struct RunResult {
  std::vector<FlowRecord> records;     // every flow, sorted by flow_id
  std::vector<TimePoint> timeseries;   // decimated; empty when disabled
  std::vector<DecisionRow> decisions;  // one per controller update
  std::vector<std::string> event_log;
};

struct RunOptions {
  int timeseries_decimation = 0;  // emit every Nth tick; 0 disables
  bool record_decisions = true;
};

// Discrete-time fluid simulation. Each tick: settle interval boundaries
// (controller updates, discards), admit arrivals, recompute allocations when
// membership or priorities changed, relax current rates toward targets
// (drops bind immediately, rises follow conv_tau), then deliver payload.
// Completion instants are interpolated inside the tick.
class Engine {
 public:
  explicit Engine(const Scenario& scenario, RunOptions options = {});

  bool done() const;
  void step();

  int64_t tick() const { return tick_; }
  double clock_s() const;
  const std::vector<FlowRuntime>& flows() const { return flows_; }
  const std::vector<std::string>& event_log() const { return log_; }

  RunResult result() const;

 private:
  void process_interval_boundary(double now_s);
  void activate_arrivals(double now_s);
  void reallocate();
  void finish_flow(int idx, double when_s);
  void emit_timeseries(double now_s);

  const Scenario* scen_;
  RunOptions opts_;
  std::vector<FlowRuntime> flows_;  // parallel to scen_->flows
  std::vector<int> active_;         // indices into flows_, ascending
  size_t next_pending_ = 0;
  int64_t tick_ = 0;
  int64_t n_ticks_ = 0;
  int64_t ticks_per_interval_ = 0;  // 0 when the scheme has no controller
  double dt_s_ = 0.0;
  double rise_factor_ = 1.0;        // 1 - exp(-dt/conv_tau); 1 = instant
  bool realloc_needed_ = true;
  int finished_ = 0;
  int nonconverged_logged_ = 0;
  std::vector<TimePoint> series_;
  std::vector<DecisionRow> decisions_;
  std::vector<std::string> log_;
  std::mt19937_64 rng_;  // reserved for stochastic knobs; dynamics are exact
};

RunResult run(const Scenario& scenario, const RunOptions& options = {});

}  // namespace reflexsim
