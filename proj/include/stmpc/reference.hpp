#pragma once

#include <Eigen/Dense>
#include <vector>

#include "stmpc/discretization.hpp"
#include "stmpc/ocp.hpp"

namespace stmpc::reference {

/// Truncated Taylor series sum_k (A t)^k / k!, adding terms until the
/// increment drops below 1e-16. Only trustworthy for ||A t|| up to order one.
Eigen::MatrixXd matrix_exponential_taylor(const Eigen::MatrixXd& A, double t);

/// (A_h, B_h) by adaptive 8th-order Runge-Kutta (Fehlberg 78) integration of
/// the matrix variational equations; independent of the exponential route.
DiscreteMap discretize_ode(const LinearSystem& sys, double h, double tol = 1e-12);

/// x(h) under a held input by the same adaptive integrator.
Eigen::VectorXd propagate_ode(const LinearSystem& sys, const Eigen::VectorXd& x0,
                              const Eigen::VectorXd& u, double h, double tol = 1e-12);

/// Composite-trapezoid value of the stage-cost kernel with the given panel
/// width; the integrand is stepped with the exact one-panel map so each node
/// costs one small matrix product.
Eigen::MatrixXd stage_cost_kernel_trapezoid(const LinearSystem& sys, const CostWeights& weights,
                                            double h, double panel_width);

/// Continuous cost of a held-input rollout: integrates x^T Q x + u^T R u
/// through the ODE solver and adds the terminal quadratic.
double continuous_cost_ode(const LinearSystem& sys, const CostWeights& weights,
                           const Eigen::MatrixXd& P_f, const Eigen::VectorXd& x0,
                           const std::vector<Eigen::VectorXd>& u_seq,
                           const std::vector<double>& intervals, double tol = 1e-12);

struct GridSearchResult {
  bool feasible = false;
  double cost = 0.0;
  Eigen::VectorXd z;
};

/// Exhaustive minimization over the input grid {-ubar, -ubar+step, ..., ubar}
/// per coordinate, honoring the terminal constraint. The outer coordinates
/// are scanned literally; the innermost coordinate's grid minimum is located
/// exactly through the convexity of the cost and constraint in that
/// coordinate, so the result equals the full scan. Oracle for the scalar
/// corpus: n = m = 1 only.
GridSearchResult ocp_grid_search(const DiscretizationTable& table,
                                 const TerminalIngredients& terminal,
                                 const SamplingPattern& pattern, const Eigen::VectorXd& x0,
                                 double step);

}  // namespace stmpc::reference
