#pragma once

#include <Eigen/Dense>

#include "stmpc/errors.hpp"

namespace stmpc {

/// Solution of  min 1/2 z^T H z + g^T z  subject to  lb <= z <= ub.
struct BoxQpResult {
  Eigen::VectorXd z;
  Eigen::VectorXi active;  ///< per-variable working set: -1 at lb, 0 free, +1 at ub
  int iterations = 0;
  double stationarity_residual = 0.0;  ///< max KKT stationarity violation
};

/// Primal active-set solver for a strictly convex box-constrained QP.
/// H must be symmetric positive definite; finite termination follows from
/// strict convexity. `warm_active` seeds the working set (e.g. from a nearby
/// problem). Throws NumericalFailureError on iteration-cap overrun.
BoxQpResult solve_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                         const Eigen::VectorXd& lb, const Eigen::VectorXd& ub,
                         const Eigen::VectorXi* warm_active = nullptr);

}  // namespace stmpc
