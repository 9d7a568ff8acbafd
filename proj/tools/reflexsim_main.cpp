#include <cstdlib>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "reflexsim/commands.hpp"

namespace {

struct CommonArgs {
  std::string scenario;
  std::string output;
  std::optional<uint64_t> seed;
  std::optional<double> efficiency;
  std::optional<double> conv_tau_s;
  std::optional<double> tick_dt_s;

  reflexsim::ScenarioOverrides overrides() const {
    reflexsim::ScenarioOverrides ov;
    ov.seed = seed;
    ov.efficiency = efficiency;
    ov.conv_tau_s = conv_tau_s;
    ov.tick_dt_s = tick_dt_s;
    return ov;
  }

  std::string out_dir() const {
    if (!output.empty()) return output;
    if (const char* env = std::getenv("REFLEXSIM_OUTPUT_DIR"); env && *env)
      return env;
    return "out";
  }
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("scenario", args.scenario, "Scenario file")
      ->required()
      ->check(CLI::ExistingFile);
  cmd->add_option("-o,--output", args.output,
                  "Output directory (default: $REFLEXSIM_OUTPUT_DIR or ./out)");
  cmd->add_option("--seed", args.seed, "Override the scenario seed");
  cmd->add_option("--efficiency", args.efficiency,
                  "Override link efficiency on every link");
  cmd->add_option("--conv-tau", args.conv_tau_s,
                  "Override the rate rise time constant, seconds");
  cmd->add_option("--tick", args.tick_dt_s,
                  "Override the simulation tick, seconds");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "reflexsim: flow-level fluid simulator for flows with bounded "
      "deprioritization and partial delivery"};
  app.require_subcommand(1);

  CommonArgs run_args;
  CLI::App* run_cmd = app.add_subcommand("run", "Simulate one scenario");
  add_common(run_cmd, run_args);

  CommonArgs cmp_args;
  std::vector<std::string> cmp_schemes;
  int cmp_seeds = 1;
  CLI::App* cmp_cmd = app.add_subcommand(
      "compare", "Run the same workload under several schemes plus baseline");
  add_common(cmp_cmd, cmp_args);
  cmp_cmd->add_option("--schemes", cmp_schemes,
                      "Scheme tags: baseline, absolute, weighted:W:L, reflex");
  cmp_cmd->add_option("--seeds", cmp_seeds, "Number of seeds to run")
      ->check(CLI::PositiveNumber);

  CommonArgs sweep_args;
  std::string sweep_param;
  std::vector<double> sweep_values;
  int sweep_seeds = 1;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "Rerun a scenario across values of one parameter");
  add_common(sweep_cmd, sweep_args);
  sweep_cmd
      ->add_option("--param", sweep_param,
                   "Swept parameter: alpha, r, D_exploit or T_int")
      ->required();
  sweep_cmd->add_option("--values", sweep_values, "Values to sweep")
      ->required()
      ->expected(-1);
  sweep_cmd->add_option("--seeds", sweep_seeds, "Number of seeds per value")
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return reflexsim::kExitBadInput;
  }

  if (run_cmd->parsed())
    return reflexsim::cmd_run(run_args.scenario, run_args.out_dir(),
                              run_args.overrides());
  if (cmp_cmd->parsed())
    return reflexsim::cmd_compare(cmp_args.scenario, cmp_schemes,
                                  cmp_args.out_dir(), cmp_args.overrides(),
                                  cmp_seeds);
  return reflexsim::cmd_sweep(sweep_args.scenario, sweep_param, sweep_values,
                              sweep_args.out_dir(), sweep_args.overrides(),
                              sweep_seeds);
}
