#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "stmpc/ocp.hpp"
#include "stmpc/trigger.hpp"

namespace stmpc {

/// Everything a closed-loop run needs. Terminal ingredients are synthesized
/// from (sys, weights, delta) when not supplied.
struct SimulationConfig {
  LinearSystem sys;
  CostWeights weights;
  TriggerParams trigger;
  double delta = 0.0;
  int n_intervals = 0;  ///< N_p
  int n_patterns = 0;   ///< M < N_p
  Eigen::VectorXd x0;
  double t_end = 0.0;
  double sample_resolution = 0.0;  ///< trace grid; 0 means delta
  std::optional<TerminalIngredients> terminal;

  void validate() const;
};

struct TraceSample {
  double t = 0.0;
  Eigen::VectorXd x;
  Eigen::VectorXd u;  ///< input held on [t, next sample)
};

/// One transmission: the decision record plus the selected solution, kept for
/// the invariant checks that replay the run.
struct TraceEvent {
  long k = 0;
  double t = 0.0;
  int pattern = 0;       ///< i_k
  double interval = 0.0; ///< i_k delta
  std::vector<double> costs;          ///< J*_i; +inf when infeasible/unsolved
  std::vector<bool> solved;           ///< pattern i was solved at this event
  std::vector<bool> feasible;
  std::vector<ConditionFlags> flags;  ///< per solved pattern
  PatternSolution selected;
  double applied_decrement = 0.0;     ///< F(x(t_k), u applied, i_k delta)
};

struct SimulationTrace {
  std::vector<TraceSample> samples;
  std::vector<TraceEvent> events;
  long transmissions = 0;
  double cumulative_stage_cost = 0.0;  ///< integral of x^T Q x + u^T R u over [t_0, t_end]
  double t_end = 0.0;
};

enum class SimulationMode { self_triggered, periodic };

/// Shared precomputation (table, terminal ingredients, condensed problems)
/// for one configuration; `run` may be called repeatedly and concurrently.
class SimulationEngine {
 public:
  explicit SimulationEngine(const SimulationConfig& config,
                            Execution exec = Execution::parallel);

  SimulationTrace run(SimulationMode mode) const;
  /// Same run with the scheduling parameters overridden (table, terminal and
  /// condensed problems are reused).
  SimulationTrace run(SimulationMode mode, const TriggerParams& trigger) const;

  const DiscretizationTable& table() const { return *table_; }
  const TerminalIngredients& terminal() const { return terminal_; }
  const OCPFamily& family() const { return *family_; }
  const SimulationConfig& config() const { return config_; }

 private:
  SimulationConfig config_;
  Execution exec_;
  std::shared_ptr<DiscretizationTable> table_;
  TerminalIngredients terminal_;
  std::shared_ptr<OCPFamily> family_;
  std::vector<DiscreteMap> grid_maps_;  ///< maps at multiples of the trace resolution
  long substeps_per_delta_ = 1;
};

/// Runs the self-triggered strategy: pattern 1 only at t_0, all M problems at
/// every later event, largest admissible pattern applied sample-and-hold, the
/// plant propagated with the exact discrete maps. Stops at the first event
/// time >= t_end.
SimulationTrace simulate(const SimulationConfig& config);

/// Same loop with the pattern forced to 1 every step (periodic baseline at
/// period delta); only pattern 1 is solved.
SimulationTrace simulate_periodic(const SimulationConfig& config);

}  // namespace stmpc
