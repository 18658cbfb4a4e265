#pragma once

#include <Eigen/Dense>

#include "stmpc/errors.hpp"

namespace stmpc {

/// Continuous-time plant  xdot = A x + B u  with a symmetric per-channel
/// input box  U = { u : |u_j| <= u_bounds_j }.
struct LinearSystem {
  Eigen::MatrixXd A;         ///< n x n
  Eigen::MatrixXd B;         ///< n x m
  Eigen::VectorXd u_bounds;  ///< m, strictly positive

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(B.cols()); }

  /// Throws InvalidInputError on dimension mismatch, non-finite entries, or
  /// non-positive input bounds. Stabilizability is checked at synthesis time.
  void validate() const;
};

/// Quadratic running-cost weights. Both must be symmetric positive definite;
/// the terminal weight lives in TerminalIngredients.
struct CostWeights {
  Eigen::MatrixXd Q;  ///< n x n
  Eigen::MatrixXd R;  ///< m x m

  void validate(int n, int m) const;
};

/// Maximum absolute asymmetry |M - M^T|.
double symmetry_error(const Eigen::MatrixXd& M);

/// Smallest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& M);

/// Throws InvalidInputError unless M is symmetric (to sym_tol) with smallest
/// eigenvalue above pd_tol. `name` labels the matrix in the error message.
void require_spd(const Eigen::MatrixXd& M, const char* name, double sym_tol = 1e-12,
                 double pd_tol = 1e-12);

}  // namespace stmpc
