#include <CLI11.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "stmpc/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Self-triggered MPC simulator for continuous-time LTI systems"};
  app.require_subcommand(1);

  stmpc::CommandArgs args;
  std::string mode = "self-triggered";
  std::vector<double> betas;
  std::uint64_t seed_value = 0;
  bool seed_given = false;

  const auto add_common = [&](CLI::App* cmd, bool needs_out) {
    cmd->add_option("--config", args.config_path, "experiment configuration file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_path,
                    needs_out ? "output file (default: stdout)" : "output file");
    cmd->add_option("--ingredients", args.ingredients_path,
                    "precomputed terminal-ingredients file")
        ->check(CLI::ExistingFile);
    cmd->add_option_function<std::uint64_t>(
        "--seed",
        [&](const std::uint64_t& v) {
          seed_value = v;
          seed_given = true;
        },
        "seed for the sampled verification suites (overrides the config)");
  };

  CLI::App* synthesize =
      app.add_subcommand("synthesize", "compute and verify the terminal ingredients");
  add_common(synthesize, true);

  CLI::App* simulate = app.add_subcommand("simulate", "run the closed loop and export the trace");
  add_common(simulate, true);
  simulate->add_option("--mode", mode, "self-triggered (default) or periodic")
      ->check(CLI::IsMember({"self-triggered", "periodic"}));

  CLI::App* compare = app.add_subcommand("compare", "trade-off table across beta values");
  add_common(compare, true);
  compare->add_option("--beta", betas, "beta values for the self-triggered runs (>= 2)")
      ->required()
      ->expected(-2);

  CLI::App* verify = app.add_subcommand("verify", "run the invariant suite");
  add_common(verify, false);

  CLI11_PARSE(app, argc, argv);
  if (seed_given) args.seed = seed_value;

  if (app.got_subcommand(synthesize)) return stmpc::cmd_synthesize(args);
  if (app.got_subcommand(simulate)) return stmpc::cmd_simulate(args, mode);
  if (app.got_subcommand(compare)) return stmpc::cmd_compare(args, betas);
  if (app.got_subcommand(verify)) return stmpc::cmd_verify(args);
  return 2;
}
