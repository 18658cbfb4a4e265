#include "stmpc/random_systems.hpp"

namespace stmpc {
namespace {

bool controllable(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  const int n = static_cast<int>(A.rows());
  Eigen::MatrixXd ctrb(n, n * B.cols());
  Eigen::MatrixXd block = B;
  for (int k = 0; k < n; ++k) {
    ctrb.middleCols(k * B.cols(), B.cols()) = block;
    block = A * block;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(ctrb);
  const double smax = svd.singularValues().maxCoeff();
  return svd.singularValues().minCoeff() > 1e-6 * std::max(1.0, smax);
}

Eigen::MatrixXd random_orthogonal(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = gauss(rng);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(G).householderQ();
}

}  // namespace

RandomProblem random_stabilizable_problem(std::mt19937_64& rng, int n, int m) {
  std::uniform_real_distribution<double> eig_dist(-2.0, 2.0);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> bound_dist(0.5, 4.0);
  std::uniform_real_distribution<double> weight_dist(0.2, 2.0);

  RandomProblem problem;
  for (int attempt = 0; attempt < 256; ++attempt) {
    Eigen::VectorXd eigs(n);
    for (int i = 0; i < n; ++i) eigs[i] = eig_dist(rng);
    const Eigen::MatrixXd V = random_orthogonal(rng, n);
    problem.sys.A = V * eigs.asDiagonal() * V.transpose();
    problem.sys.B.resize(n, m);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < m; ++j) problem.sys.B(i, j) = unit(rng);
    if (!controllable(problem.sys.A, problem.sys.B)) continue;
    problem.sys.u_bounds.resize(m);
    for (int j = 0; j < m; ++j) problem.sys.u_bounds[j] = bound_dist(rng);

    Eigen::VectorXd q(n), r(m);
    for (int i = 0; i < n; ++i) q[i] = weight_dist(rng);
    for (int j = 0; j < m; ++j) r[j] = weight_dist(rng);
    const Eigen::MatrixXd W = random_orthogonal(rng, n);
    problem.weights.Q = W * q.asDiagonal() * W.transpose();
    problem.weights.Q = 0.5 * (problem.weights.Q + problem.weights.Q.transpose());
    problem.weights.R = r.asDiagonal();
    return problem;
  }
  throw NumericalFailureError("random_stabilizable_problem: no controllable sample found");
}

Eigen::VectorXd random_feasible_state(std::mt19937_64& rng, const OCPFamily& family,
                                      double initial_radius) {
  const int n = family.table().system().state_dim();
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd direction(n);
  for (int i = 0; i < n; ++i) direction[i] = gauss(rng);
  if (direction.norm() < 1e-12) direction[0] = 1.0;
  direction.normalize();

  double radius = initial_radius;
  for (int attempt = 0; attempt < 60; ++attempt) {
    const Eigen::VectorXd x0 = radius * direction;
    if (family.solve(1, x0).feasible()) return x0;
    radius *= 0.5;
  }
  return Eigen::VectorXd::Zero(n);
}

}  // namespace stmpc
