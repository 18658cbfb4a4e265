#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace stmpc {

/// Options shared by the CLI subcommands.
struct CommandArgs {
  std::string config_path;
  std::string out_path;          ///< empty = stdout
  std::string ingredients_path;  ///< optional precomputed terminal ingredients
  std::optional<std::uint64_t> seed;
};

/// synthesize: compute and verify the terminal ingredients, write them to
/// --out, print the verification report. Exit 0 iff verification passes.
int cmd_synthesize(const CommandArgs& args);

/// simulate: run the closed loop and write the trace CSV. `mode` is
/// "self-triggered" or "periodic". Exit 0 on success.
int cmd_simulate(const CommandArgs& args, const std::string& mode);

/// compare: periodic baseline plus one self-triggered run per beta; writes a
/// machine-readable CSV to --out and a table to stdout. Needs >= 2 betas.
int cmd_compare(const CommandArgs& args, const std::vector<double>& betas);

/// verify: run the full invariant suite against the configuration, printing
/// one pass/fail line per invariant with measured residuals. Exit 0 iff all
/// pass.
int cmd_verify(const CommandArgs& args);

}  // namespace stmpc
