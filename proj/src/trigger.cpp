#include "stmpc/trigger.hpp"

#include <cmath>
#include <sstream>

namespace stmpc {
namespace {

// Absolute slack on the scheduling comparisons, protecting pattern 1 from
// rejection by round-off.
constexpr double kConditionSlack = 1e-9;

}  // namespace

void TriggerParams::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw InvalidInputError("TriggerParams: beta must satisfy beta >= 0");
  }
  if (!(gamma > 0.0) || !(gamma <= 1.0)) {
    throw InvalidInputError("TriggerParams: gamma must lie in (0, 1]");
  }
}

TriggerInit initialize_trigger(const PatternSolution& pattern1_solution,
                               const DiscretizationTable& table) {
  if (pattern1_solution.pattern.index != 1) {
    throw InvalidInputError("initialize_trigger: expected the pattern-1 solution");
  }
  if (!pattern1_solution.feasible()) {
    throw InitialInfeasibilityError(
        "initialize_trigger: pattern 1 infeasible at the initial state (terminal excess " +
        std::to_string(pattern1_solution.terminal_excess) + ")");
  }
  TriggerInit init;
  init.pattern = 1;
  init.state.step = 0;
  init.state.prev_pattern = 1;
  init.state.prev_cost = pattern1_solution.cost;
  init.state.prev_decrement = stage_cost(pattern1_solution.x_seq.front(),
                                         pattern1_solution.u_seq.front(), table.kernel(1));
  return init;
}

ConditionFlags check_conditions(int i, const std::vector<PatternSolution>& solutions,
                                const TriggerState& state, const TriggerParams& params) {
  ConditionFlags flags;
  if (i < 1 || i > static_cast<int>(solutions.size())) {
    throw InvalidInputError("check_conditions: pattern index out of range");
  }
  const PatternSolution& sol = solutions[i - 1];
  if (!sol.feasible() || !solutions.front().feasible()) {
    return flags;  // infeasible patterns fail both conditions
  }
  const double cost_1 = solutions.front().cost;
  flags.cost_gap_ok = sol.cost <= cost_1 + params.beta + kConditionSlack;
  flags.decrease_ok =
      sol.cost <= state.prev_cost - params.gamma * state.prev_decrement + kConditionSlack;
  return flags;
}

SelectResult select_pattern(const std::vector<PatternSolution>& solutions,
                            const TriggerState& state, const TriggerParams& params,
                            const DiscretizationTable& table) {
  params.validate();
  SelectResult result;
  result.flags.resize(solutions.size());
  int selected = 0;
  for (int i = static_cast<int>(solutions.size()); i >= 1; --i) {
    result.flags[i - 1] = check_conditions(i, solutions, state, params);
    if (selected == 0 && result.flags[i - 1].cost_gap_ok && result.flags[i - 1].decrease_ok) {
      selected = i;
    }
  }
  if (selected == 0) {
    std::ostringstream msg;
    msg << "select_pattern: no admissible pattern at step " << state.step + 1
        << " (prev pattern " << state.prev_pattern << ", prev cost " << state.prev_cost
        << ", prev decrement " << state.prev_decrement;
    if (solutions.front().feasible()) {
      msg << ", J*_1 " << solutions.front().cost;
    } else {
      msg << ", pattern 1 infeasible";
    }
    msg << ")";
    throw ContractViolationError(msg.str());
  }

  const PatternSolution& chosen = solutions[selected - 1];
  result.pattern = selected;
  result.next_state.step = state.step + 1;
  result.next_state.prev_pattern = selected;
  result.next_state.prev_cost = chosen.cost;
  result.next_state.prev_decrement =
      stage_cost(chosen.x_seq.front(), chosen.u_seq.front(), table.kernel(selected));
  return result;
}

}  // namespace stmpc
