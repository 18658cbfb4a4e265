#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "stmpc/simulator.hpp"

namespace stmpc {

struct CheckResult {
  std::string name;
  bool pass = false;
  double measured = 0.0;   ///< the residual or violation that was measured
  double threshold = 0.0;  ///< what it was compared against
  std::string detail;
};

struct VerificationReport {
  std::vector<CheckResult> checks;

  bool all_pass() const;
  void print(std::ostream& out) const;
};

/// Builds the shifted pattern-1 candidate at the state reached after applying
/// `previous`'s first input: the tail of the previous inputs followed by the
/// local feedback for the remaining steps. Returns the full N_p-long input
/// sequence for pattern 1.
std::vector<Eigen::VectorXd> shifted_candidate(const PatternSolution& previous,
                                               const TerminalIngredients& terminal,
                                               const DiscretizationTable& table);

/// Runs every module's runtime-checkable invariant against the engine's
/// configuration: oracle comparisons for the exponential, the discrete maps
/// and the kernels, kernel definiteness and the semigroup and cost-splitting
/// identities, terminal verification, and the scheduling invariants measured
/// along a full self-triggered run (cost chain monotonicity, shifted-candidate
/// decrease, pattern-1 availability, Lyapunov decrease, cost cross-checks,
/// plant-propagation exactness, trace well-formedness).
VerificationReport run_invariant_suite(const SimulationEngine& engine, std::uint64_t seed);

}  // namespace stmpc
