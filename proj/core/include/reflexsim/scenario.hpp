#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "reflexsim/validate.hpp"
#include "reflexsim/workload.hpp"

namespace reflexsim {

// Anything wrong with a scenario file or its parameters. Messages name the
// offending key or value.
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct OutputConfig {
  int timeseries_decimation = 0;  // 0 disables the time series
};

// Parsed scenario document, before workload expansion. Kept separate from
// the built Scenario so compare/sweep can restamp scheme, seed, or swept
// parameters and regenerate flows.
struct ScenarioDoc {
  Topology topology;
  std::vector<ArrivalProcess> workloads;
  Scheme scheme;
  SimConfig sim;
  OutputConfig outputs;
  bool has_reflex_section = false;
  PhaseConfig phases;  // valid when has_reflex_section
};

struct ScenarioOverrides {
  std::optional<uint64_t> seed;
  std::optional<double> efficiency;  // restamps every link
  std::optional<double> conv_tau_s;
  std::optional<double> tick_dt_s;
};

ScenarioDoc parse_scenario_file(const std::filesystem::path& path);

void apply_overrides(ScenarioDoc& doc, const ScenarioOverrides& ov);

enum class SweepParam { Alpha, R, DExploit, TInt };

std::optional<SweepParam> sweep_param_from_string(const std::string& name);
const char* to_string(SweepParam p);

// Restamps one swept value: Alpha/R rewrite every flexible workload
// template, DExploit/TInt rewrite the probing cycle.
void apply_sweep_param(ScenarioDoc& doc, SweepParam param, double value);

// Replaces the scheme (compare). "reflex" requires a reflex section.
void apply_scheme(ScenarioDoc& doc, const Scheme& scheme);

// Scheme tag as used on the command line and in output paths:
// baseline | absolute | weighted:W_HIGH:W_LOW | reflex
Scheme parse_scheme_tag(const std::string& tag, const ScenarioDoc& doc);
std::string scheme_tag(const Scheme& scheme);

// Expands workloads under `seed` and validates. Throws ScenarioError.
Scenario build_scenario(const ScenarioDoc& doc, uint64_t seed);

}  // namespace reflexsim
