#pragma once

#include <optional>
#include <string>
#include <vector>

#include "reflexsim/types.hpp"

namespace reflexsim {

enum class ValidationCode {
  MissingRoute,
  InvalidReliability,
  InvalidAlpha,
  SizeRequired,
  KindMismatch,
  DuplicateFlowId,
  BadArrival,
  BadLink,
  BadRoute,
  BadPhase,
  BadSim,
  TickMisaligned,
};

const char* to_string(ValidationCode c);

struct ValidationError {
  ValidationCode code;
  std::string message;
};

// A scenario that passed validation. Flows are canonically ordered by
// (arrival_time, flow_id) and flow_routes[i] holds the link positions
// (indices into topology.links) for flows[i].
struct Scenario {
  Topology topology;
  std::vector<FlowSpec> flows;
  Scheme scheme;
  SimConfig sim;
  std::vector<std::vector<int>> flow_routes;

  int ticks_per_interval = 0;  // set when scheme.kind == ReFlex
};

struct ValidationResult {
  std::optional<Scenario> scenario;
  std::vector<ValidationError> errors;

  bool ok() const { return scenario.has_value(); }
};

// Pure check of every structural invariant; same verdict for any permutation
// of the flow list.
ValidationResult validate_scenario(const Topology& topology,
                                   const std::vector<FlowSpec>& flows,
                                   const Scheme& scheme, const SimConfig& sim);

}  // namespace reflexsim
