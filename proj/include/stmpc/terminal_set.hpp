#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "stmpc/discretization.hpp"

namespace stmpc {

/// Terminal ellipsoid Phi = { x : x^T P_f x <= epsilon } together with the
/// local feedback u = K x that is admissible and Lyapunov-decreasing on it.
struct TerminalIngredients {
  Eigen::MatrixXd K;    ///< m x n, sign convention u = K x
  Eigen::MatrixXd P_f;  ///< n x n symmetric positive definite
  double epsilon = 0.0;
  double delta = 0.0;   ///< base step these were synthesized for

  void validate(int n, int m) const;
};

/// Offline synthesis: discrete LQR for the delta-sampled system under the
/// cross-weighted cost given by the blocks of Gamma(delta). The Riccati
/// solution P_f makes the one-step Lyapunov condition hold with equality, and
/// epsilon is the largest level at which K x stays inside the input box.
/// Throws SynthesisFailureError if (A_delta, B_delta) has an uncontrollable
/// unstable mode, NumericalFailureError if the Riccati iteration stalls.
TerminalIngredients synthesize_terminal(const LinearSystem& sys, const CostWeights& weights,
                                        const DiscretizationTable& table);

/// Outcome of verify_terminal. `pass` requires the Lyapunov residual below
/// 1e-10, a nonnegative analytic input margin, and no sampled violation.
struct TerminalReport {
  double lyapunov_max_eigenvalue = 0.0;   ///< max eig of A_cl^T P A_cl - P + M_K
  double input_margin = 0.0;              ///< min_j (ubar_j - sup_{x in Phi} |K_j x|)
  double sampled_decrease_violation = 0.0;  ///< worst Lyapunov-decrease violation over samples
  double sampled_input_violation = 0.0;     ///< worst |K_j x| - ubar_j over samples
  int samples = 0;
  bool pass = false;

  std::string summary() const;
};

/// Independent verifier for Assumption-1 ingredients: eigenvalue test of the
/// closed-loop Lyapunov inequality, the closed-form input-admissibility
/// margin over Phi, and a sampled check of the decrease condition on and
/// inside the ellipsoid. Never throws; always returns the measured report.
TerminalReport verify_terminal(const TerminalIngredients& ing, const LinearSystem& sys,
                               const CostWeights& weights, const DiscretizationTable& table,
                               int n_samples = 1000, std::uint64_t seed = 0x5eed);

}  // namespace stmpc
