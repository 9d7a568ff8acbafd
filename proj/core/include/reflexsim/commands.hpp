#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "reflexsim/engine.hpp"
#include "reflexsim/scenario.hpp"

namespace reflexsim {

// Exit codes shared with the CLI: 0 ok, 1 parse/validation, 2 runtime.
inline constexpr int kExitOk = 0;
inline constexpr int kExitBadInput = 1;
inline constexpr int kExitRuntime = 2;

// Serialization used by the commands; exposed for tests. Unbounded values
// are written as "inf", unfinished completion/fct likewise.
void write_flows_csv(std::ostream& out, const std::vector<FlowRecord>& records);
void write_timeseries_csv(std::ostream& out,
                          const std::vector<TimePoint>& series);

// run: simulate one scenario, write flows.csv, timeseries.csv (when a
// decimation is configured) and summary.txt under out_dir.
int cmd_run(const std::filesystem::path& scenario_path,
            const std::filesystem::path& out_dir,
            const ScenarioOverrides& overrides);

// compare: identical workloads under each requested scheme plus baseline.
// Writes per-scheme/per-seed flows.csv + speedups.csv and an aggregated
// compare.csv (min/mean/max over seeds per metric).
int cmd_compare(const std::filesystem::path& scenario_path,
                const std::vector<std::string>& scheme_tags,
                const std::filesystem::path& out_dir,
                const ScenarioOverrides& overrides, int n_seeds);

// sweep: one run per (value, seed) plus a shared per-seed baseline; emits a
// long-format results.csv keyed (param, value, seed, metric).
int cmd_sweep(const std::filesystem::path& scenario_path,
              const std::string& param_name, const std::vector<double>& values,
              const std::filesystem::path& out_dir,
              const ScenarioOverrides& overrides, int n_seeds);

}  // namespace reflexsim
