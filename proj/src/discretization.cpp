#include "stmpc/discretization.hpp"

#include <array>
#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

namespace stmpc {
namespace {

// 15-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 15> kGlNodes = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272, -0.7244177313601701,
    -0.5709721726085388, -0.3941513470775634, -0.2011940939974345, 0.0,
    0.2011940939974345,  0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
constexpr std::array<double, 15> kGlWeights = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719, 0.1395706779261543,
    0.1662692058169939, 0.1861610000155622, 0.1984314853271116, 0.2025782419255613,
    0.1984314853271116, 0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

// Augmented matrix [[A, B], [0, 0]]; its exponential at s carries (A_s, B_s)
// in the top blocks.
Eigen::MatrixXd augmented(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const int n = static_cast<int>(A.rows());
  const int m = static_cast<int>(B.cols());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + m, n + m);
  M.topLeftCorner(n, n) = A;
  M.topRightCorner(n, m) = B;
  return M;
}

class KernelIntegrand {
 public:
  KernelIntegrand(const LinearSystem& sys, const CostWeights& weights)
      : aug_(augmented(sys.A, sys.B)),
        Q_(weights.Q),
        R_(weights.R),
        n_(sys.state_dim()),
        m_(sys.input_dim()) {}

  // [A_s B_s]^T Q [A_s B_s] + blkdiag(0, R) at arclength s.
  Eigen::MatrixXd operator()(double s) const {
    const Eigen::MatrixXd E = (aug_ * s).exp();
    const Eigen::MatrixXd C = E.topRows(n_);  // [A_s, B_s]
    Eigen::MatrixXd G = C.transpose() * Q_ * C;
    G.bottomRightCorner(m_, m_) += R_;
    return G;
  }

  Eigen::MatrixXd gauss15(double a, double b) const {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n_ + m_, n_ + m_);
    for (std::size_t q = 0; q < kGlNodes.size(); ++q) {
      acc += (kGlWeights[q] * half) * (*this)(mid + half * kGlNodes[q]);
    }
    return acc;
  }

 private:
  Eigen::MatrixXd aug_;
  Eigen::MatrixXd Q_, R_;
  int n_, m_;
};

Eigen::MatrixXd adaptive_quad(const KernelIntegrand& f, double a, double b, double tol,
                              int depth) {
  if (depth > 28) {
    throw NumericalFailureError("stage_cost_kernel: quadrature failed to converge on [" +
                                std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  const Eigen::MatrixXd whole = f.gauss15(a, b);
  const double mid = 0.5 * (a + b);
  const Eigen::MatrixXd left = f.gauss15(a, mid);
  const Eigen::MatrixXd right = f.gauss15(mid, b);
  const double err = (whole - left - right).cwiseAbs().maxCoeff();
  if (err < tol) {
    return left + right;
  }
  return adaptive_quad(f, a, mid, 0.5 * tol, depth + 1) +
         adaptive_quad(f, mid, b, 0.5 * tol, depth + 1);
}

}  // namespace

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& A, double t) {
  if (A.rows() != A.cols() || !A.allFinite()) {
    throw InvalidInputError("matrix_exponential: A must be square with finite entries");
  }
  if (!std::isfinite(t) || t < 0.0) {
    throw InvalidInputError("matrix_exponential: t must be finite and nonnegative");
  }
  return (A * t).exp();
}

DiscreteMap discretize(const LinearSystem& sys, double h) {
  sys.validate();
  if (!std::isfinite(h) || h <= 0.0) {
    throw InvalidInputError("discretize: h must be positive, got " + std::to_string(h));
  }
  const int n = sys.state_dim();
  const int m = sys.input_dim();
  const Eigen::MatrixXd E = matrix_exponential(augmented(sys.A, sys.B), h);
  return DiscreteMap{E.topLeftCorner(n, n), E.topRightCorner(n, m)};
}

Eigen::MatrixXd stage_cost_kernel(const LinearSystem& sys, const CostWeights& weights, double h,
                                  double abs_tol) {
  sys.validate();
  weights.validate(sys.state_dim(), sys.input_dim());
  if (!std::isfinite(h) || h <= 0.0) {
    throw InvalidInputError("stage_cost_kernel: h must be positive, got " + std::to_string(h));
  }
  const KernelIntegrand f(sys, weights);
  Eigen::MatrixXd G = adaptive_quad(f, 0.0, h, abs_tol, 0);
  return 0.5 * (G + G.transpose());
}

double stage_cost(const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                  const Eigen::MatrixXd& kernel) {
  if (x.size() + u.size() != kernel.rows() || kernel.rows() != kernel.cols()) {
    throw InvalidInputError("stage_cost: kernel must be (n+m) x (n+m)");
  }
  Eigen::VectorXd xu(x.size() + u.size());
  xu << x, u;
  return xu.dot(kernel * xu);
}

DiscretizationTable DiscretizationTable::build(const LinearSystem& sys,
                                               const CostWeights& weights, double delta,
                                               int n_intervals, int n_patterns, Execution exec) {
  sys.validate();
  weights.validate(sys.state_dim(), sys.input_dim());
  if (!std::isfinite(delta) || delta <= 0.0) {
    throw InvalidInputError("DiscretizationTable: delta must be positive");
  }
  if (n_intervals < 1 || n_patterns < 1 || n_patterns >= n_intervals) {
    throw InvalidInputError("DiscretizationTable: need 1 <= M < N_p");
  }

  DiscretizationTable table;
  table.sys_ = sys;
  table.weights_ = weights;
  table.delta_ = delta;
  table.n_intervals_ = n_intervals;
  table.n_patterns_ = n_patterns;
  table.maps_.resize(n_patterns);
  table.kernels_.resize(n_patterns);

  // Independent per-entry work; entry i computes the maps and kernel for
  // h = (i+1) delta from scratch, so the result does not depend on order.
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < n_patterns; ++i) {
      table.maps_[i] = discretize(sys, (i + 1) * delta);
      table.kernels_[i] = stage_cost_kernel(sys, weights, (i + 1) * delta);
    }
  } else {
    for (int i = 0; i < n_patterns; ++i) {
      table.maps_[i] = discretize(sys, (i + 1) * delta);
      table.kernels_[i] = stage_cost_kernel(sys, weights, (i + 1) * delta);
    }
  }

  // Kernels must be symmetric positive definite.
  for (int i = 0; i < n_patterns; ++i) {
    const double lam = min_eigenvalue(table.kernels_[i]);
    if (lam <= 0.0) {
      throw NumericalFailureError("DiscretizationTable: Gamma(" + std::to_string((i + 1) * delta) +
                                  ") not positive definite (min eigenvalue " +
                                  std::to_string(lam) + ")");
    }
  }
  // Semigroup consistency: A_{i delta} = A_delta A_{(i-1) delta} and the
  // matching identity for B, to 1e-10 relative.
  for (int i = 1; i < n_patterns; ++i) {
    const DiscreteMap& one = table.maps_[0];
    const DiscreteMap& prev = table.maps_[i - 1];
    const DiscreteMap& cur = table.maps_[i];
    const double err_a = (cur.A - one.A * prev.A).cwiseAbs().maxCoeff() /
                         std::max(1.0, cur.A.cwiseAbs().maxCoeff());
    const double err_b = (cur.B - (one.A * prev.B + one.B)).cwiseAbs().maxCoeff() /
                         std::max(1.0, cur.B.cwiseAbs().maxCoeff());
    if (err_a > 1e-10 || err_b > 1e-10) {
      throw NumericalFailureError("DiscretizationTable: semigroup consistency violated at i = " +
                                  std::to_string(i + 1));
    }
  }
  return table;
}

}  // namespace stmpc
