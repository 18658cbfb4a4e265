#include "stmpc/linear_system.hpp"

#include <string>

namespace stmpc {

double symmetry_error(const Eigen::MatrixXd& M) {
  return (M - M.transpose()).cwiseAbs().maxCoeff();
}

double min_eigenvalue(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void require_spd(const Eigen::MatrixXd& M, const char* name, double sym_tol, double pd_tol) {
  if (M.rows() == 0 || M.rows() != M.cols()) {
    throw InvalidInputError(std::string(name) + ": expected a square matrix, got " +
                            std::to_string(M.rows()) + "x" + std::to_string(M.cols()));
  }
  if (!M.allFinite()) {
    throw InvalidInputError(std::string(name) + ": non-finite entries");
  }
  if (symmetry_error(M) > sym_tol) {
    throw InvalidInputError(std::string(name) + ": not symmetric (asymmetry " +
                            std::to_string(symmetry_error(M)) + ")");
  }
  const double lam = min_eigenvalue(0.5 * (M + M.transpose()));
  if (lam <= pd_tol) {
    throw InvalidInputError(std::string(name) + ": not positive definite (min eigenvalue " +
                            std::to_string(lam) + ")");
  }
}

void LinearSystem::validate() const {
  if (A.rows() < 1 || A.rows() != A.cols()) {
    throw InvalidInputError("LinearSystem: A must be square with n >= 1");
  }
  if (B.rows() != A.rows() || B.cols() < 1) {
    throw InvalidInputError("LinearSystem: B must be n x m with m >= 1");
  }
  if (!A.allFinite() || !B.allFinite()) {
    throw InvalidInputError("LinearSystem: non-finite entries in A or B");
  }
  if (u_bounds.size() != B.cols()) {
    throw InvalidInputError("LinearSystem: u_bounds must have one entry per input channel");
  }
  for (int j = 0; j < u_bounds.size(); ++j) {
    if (!std::isfinite(u_bounds[j]) || u_bounds[j] <= 0.0) {
      throw InvalidInputError("LinearSystem: u_bounds[" + std::to_string(j) +
                              "] must be finite and strictly positive");
    }
  }
}

void CostWeights::validate(int n, int m) const {
  if (Q.rows() != n || Q.cols() != n) {
    throw InvalidInputError("CostWeights: Q must be n x n");
  }
  if (R.rows() != m || R.cols() != m) {
    throw InvalidInputError("CostWeights: R must be m x m");
  }
  require_spd(Q, "Q");
  require_spd(R, "R");
}

}  // namespace stmpc
