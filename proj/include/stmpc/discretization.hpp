#pragma once

#include <Eigen/Dense>
#include <vector>

#include "stmpc/execution.hpp"
#include "stmpc/linear_system.hpp"

namespace stmpc {

/// e^{A t} by scaling-and-squaring with a Pade approximant.
/// Throws InvalidInputError for non-finite A or t < 0.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& A, double t);

/// Zero-order-hold map over one interval: x(t+h) = A_h x(t) + B_h u.
struct DiscreteMap {
  Eigen::MatrixXd A;  ///< e^{A h}
  Eigen::MatrixXd B;  ///< (int_0^h e^{A tau} dtau) B
};

/// Exact discretization via the augmented exponential exp([[A,B],[0,0]] h).
/// Throws InvalidInputError for h <= 0.
DiscreteMap discretize(const LinearSystem& sys, double h);

/// Integrated stage-cost kernel
///   Gamma(h) = int_0^h [A_s B_s]^T Q [A_s B_s] ds  +  blkdiag(0, h R),
/// an (n+m) x (n+m) symmetric positive definite matrix, so that the running
/// cost of a held input over [0,h] equals [x;u]^T Gamma(h) [x;u].
/// Computed by adaptive Gauss-Legendre quadrature to absolute tolerance
/// `abs_tol`, then symmetrized. Throws InvalidInputError for h <= 0 and
/// NumericalFailureError if refinement does not converge.
Eigen::MatrixXd stage_cost_kernel(const LinearSystem& sys, const CostWeights& weights, double h,
                                  double abs_tol = 1e-11);

/// [x;u]^T Gamma [x;u]. Throws InvalidInputError on dimension mismatch.
double stage_cost(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                  const Eigen::MatrixXd& kernel);

/// Precomputed maps and kernels for h in {delta, 2 delta, ..., M delta},
/// shared by every optimal-control problem. Immutable after construction and
/// safe to read concurrently.
class DiscretizationTable {
 public:
  /// Builds and validates the table. `n_intervals` is the horizon length N_p
  /// (so the horizon is T_p = N_p delta) and `n_patterns` is M < N_p.
  /// Construction of the M entries is data-parallel under
  /// Execution::parallel; both policies produce identical tables.
  static DiscretizationTable build(const LinearSystem& sys, const CostWeights& weights,
                                   double delta, int n_intervals, int n_patterns,
                                   Execution exec = Execution::parallel);

  double delta() const { return delta_; }
  int intervals() const { return n_intervals_; }      ///< N_p
  int patterns() const { return n_patterns_; }        ///< M
  double horizon() const { return n_intervals_ * delta_; }

  /// Map over h = i delta, i in 1..M.
  const DiscreteMap& map(int i) const { return maps_.at(i - 1); }
  /// Gamma(i delta), i in 1..M.
  const Eigen::MatrixXd& kernel(int i) const { return kernels_.at(i - 1); }

  const LinearSystem& system() const { return sys_; }
  const CostWeights& weights() const { return weights_; }

 private:
  DiscretizationTable() = default;

  LinearSystem sys_;
  CostWeights weights_;
  double delta_ = 0.0;
  int n_intervals_ = 0;
  int n_patterns_ = 0;
  std::vector<DiscreteMap> maps_;
  std::vector<Eigen::MatrixXd> kernels_;
};

}  // namespace stmpc
