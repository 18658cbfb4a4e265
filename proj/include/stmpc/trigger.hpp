#pragma once

#include <vector>

#include "stmpc/ocp.hpp"

namespace stmpc {

/// Pattern-selection parameters: beta bounds the admissible cost gap to the
/// shortest pattern, gamma the enforced fraction of the guaranteed per-step
/// decrement.
struct TriggerParams {
  double beta = 0.0;   ///< >= 0
  double gamma = 1.0;  ///< in (0, 1]

  void validate() const;
};

/// Carry-over between consecutive scheduling decisions.
struct TriggerState {
  long step = 0;                ///< k
  int prev_pattern = 0;         ///< i_{k-1}
  double prev_cost = 0.0;       ///< J*_{i_{k-1}}(x(t_{k-1}))
  double prev_decrement = 0.0;  ///< F(x(t_{k-1}), applied input, i_{k-1} delta)
};

/// Per-pattern outcome of the two admissibility tests.
struct ConditionFlags {
  bool cost_gap_ok = false;  ///< J*_i <= J*_1 + beta
  bool decrease_ok = false;  ///< J*_i <= prev_cost - gamma * prev_decrement
};

struct TriggerInit {
  int pattern = 1;  ///< i_0
  TriggerState state;
};

/// Seeds the scheduler from the pattern-1 solution at t_0 (step (i) of the
/// closed-loop strategy). Throws InitialInfeasibilityError when pattern 1 is
/// infeasible at x(t_0).
TriggerInit initialize_trigger(const PatternSolution& pattern1_solution,
                               const DiscretizationTable& table);

/// Pure predicate: evaluates both admissibility conditions for pattern i
/// against the given solutions and state. Infeasible (or unsolved) patterns
/// fail both. Comparisons carry an absolute slack of 1e-9.
ConditionFlags check_conditions(int i, const std::vector<PatternSolution>& solutions,
                                const TriggerState& state, const TriggerParams& params);

struct SelectResult {
  int pattern = 0;                     ///< i_k
  TriggerState next_state;             ///< state advanced to step k
  std::vector<ConditionFlags> flags;   ///< per-pattern condition outcomes
};

/// Selects the largest admissible pattern and advances the state, recomputing
/// the decrement as F(x(t_k), u*_{i_k}(t_k), i_k delta) from the table.
/// Throws ContractViolationError when no pattern qualifies (unreachable in a
/// correct closed loop).
SelectResult select_pattern(const std::vector<PatternSolution>& solutions,
                            const TriggerState& state, const TriggerParams& params,
                            const DiscretizationTable& table);

}  // namespace stmpc
