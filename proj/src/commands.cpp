#include "stmpc/commands.hpp"

#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <sstream>

#include "stmpc/config.hpp"
#include "stmpc/trace_io.hpp"
#include "stmpc/verification.hpp"

namespace stmpc {
namespace {

constexpr double kSettlingThreshold = 0.05;

void write_output(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw InvalidInputError("cannot open output file '" + path + "'");
  }
  out << content;
}

SimulationConfig load_simulation_config(const CommandArgs& args, ExperimentConfig* parsed) {
  ExperimentConfig cfg = ExperimentConfig::parse_file(args.config_path);
  if (parsed != nullptr) *parsed = cfg;
  SimulationConfig sim = cfg.simulation();
  if (!args.ingredients_path.empty()) {
    sim.terminal = parse_terminal_file(args.ingredients_path);
  }
  return sim;
}

int run_guarded(const char* command, const std::function<int()>& body) {
  try {
    return body();
  } catch (const Error& err) {
    std::cerr << command << ": " << err.what() << "\n";
    return 1;
  }
}

}  // namespace

int cmd_synthesize(const CommandArgs& args) {
  return run_guarded("synthesize", [&] {
    ExperimentConfig cfg = ExperimentConfig::parse_file(args.config_path);
    const LinearSystem sys = cfg.system();
    const CostWeights weights = cfg.weights();
    const DiscretizationTable table = DiscretizationTable::build(
        sys, weights, cfg.delta, cfg.n_intervals, cfg.n_patterns);
    const TerminalIngredients ing = synthesize_terminal(sys, weights, table);
    const std::uint64_t seed = args.seed.value_or(cfg.seed);
    const TerminalReport report = verify_terminal(ing, sys, weights, table, 1000, seed);

    write_output(args.out_path, serialize_terminal(ing));
    std::cout << report.summary() << "\n";
    return report.pass ? 0 : 1;
  });
}

int cmd_simulate(const CommandArgs& args, const std::string& mode) {
  return run_guarded("simulate", [&] {
    if (mode != "self-triggered" && mode != "periodic") {
      throw InvalidInputError("simulate: --mode must be self-triggered or periodic");
    }
    const SimulationConfig sim = load_simulation_config(args, nullptr);
    const SimulationEngine engine(sim);
    const SimulationTrace trace = engine.run(
        mode == "periodic" ? SimulationMode::periodic : SimulationMode::self_triggered);

    std::ostringstream csv;
    write_trace_csv(csv, trace, sim.sys.state_dim(), sim.sys.input_dim(), sim.n_patterns);
    write_output(args.out_path, csv.str());
    return 0;
  });
}

int cmd_compare(const CommandArgs& args, const std::vector<double>& betas) {
  return run_guarded("compare", [&] {
    if (betas.size() < 2) {
      throw InvalidInputError("compare: need at least two --beta values");
    }
    const SimulationConfig sim = load_simulation_config(args, nullptr);
    const SimulationEngine engine(sim);

    std::vector<ComparisonRow> rows;
    {
      const SimulationTrace trace = engine.run(SimulationMode::periodic);
      rows.push_back(ComparisonRow{"periodic", 0.0, trace.transmissions,
                                   trace.cumulative_stage_cost,
                                   settling_time(trace, kSettlingThreshold)});
    }
    for (const double beta : betas) {
      TriggerParams params = sim.trigger;
      params.beta = beta;
      params.validate();
      const SimulationTrace trace = engine.run(SimulationMode::self_triggered, params);
      rows.push_back(ComparisonRow{"self-triggered", beta, trace.transmissions,
                                   trace.cumulative_stage_cost,
                                   settling_time(trace, kSettlingThreshold)});
    }

    std::ostringstream csv;
    write_comparison_csv(csv, rows);
    write_output(args.out_path, csv.str());
    if (!args.out_path.empty()) {
      write_comparison_text(std::cout, rows);
    }
    return 0;
  });
}

int cmd_verify(const CommandArgs& args) {
  return run_guarded("verify", [&] {
    ExperimentConfig cfg;
    const SimulationConfig sim = load_simulation_config(args, &cfg);
    const SimulationEngine engine(sim);
    const VerificationReport report =
        run_invariant_suite(engine, args.seed.value_or(cfg.seed));
    report.print(std::cout);
    std::cout << (report.all_pass() ? "all invariants hold\n" : "invariant failures detected\n");
    return report.all_pass() ? 0 : 1;
  });
}

}  // namespace stmpc
