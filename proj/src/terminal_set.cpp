#include "stmpc/terminal_set.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <sstream>

namespace stmpc {
namespace {

// PBH test: every eigenvalue of A_d on or outside the unit circle must keep
// [A_d - lambda I, B_d] at full row rank.
void require_stabilizable(const Eigen::MatrixXd& A_d, const Eigen::MatrixXd& B_d) {
  const int n = static_cast<int>(A_d.rows());
  const Eigen::VectorXcd eigs = Eigen::EigenSolver<Eigen::MatrixXd>(A_d).eigenvalues();
  for (int k = 0; k < n; ++k) {
    const std::complex<double> lam = eigs[k];
    if (std::abs(lam) < 1.0 - 1e-9) continue;
    Eigen::MatrixXcd pencil(n, n + B_d.cols());
    pencil << A_d.cast<std::complex<double>>() - lam * Eigen::MatrixXcd::Identity(n, n),
        B_d.cast<std::complex<double>>();
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(pencil);
    const double smin = svd.singularValues().minCoeff();
    const double scale = std::max(1.0, svd.singularValues().maxCoeff());
    if (smin < 1e-10 * scale) {
      std::ostringstream msg;
      msg << "synthesize_terminal: (A_delta, B_delta) not stabilizable; uncontrollable mode at "
             "eigenvalue "
          << lam.real() << (lam.imag() >= 0 ? "+" : "") << lam.imag() << "i (|lambda| = "
          << std::abs(lam) << ")";
      throw SynthesisFailureError(msg.str());
    }
  }
}

}  // namespace

void TerminalIngredients::validate(int n, int m) const {
  if (K.rows() != m || K.cols() != n) {
    throw InvalidInputError("TerminalIngredients: K must be m x n");
  }
  require_spd(P_f, "P_f");
  if (P_f.rows() != n) {
    throw InvalidInputError("TerminalIngredients: P_f must be n x n");
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw InvalidInputError("TerminalIngredients: epsilon must be positive");
  }
  if (!(delta > 0.0)) {
    throw InvalidInputError("TerminalIngredients: delta must be positive");
  }
}

TerminalIngredients synthesize_terminal(const LinearSystem& sys, const CostWeights& weights,
                                        const DiscretizationTable& table) {
  const int n = sys.state_dim();
  const int m = sys.input_dim();
  weights.validate(n, m);

  const Eigen::MatrixXd& A_d = table.map(1).A;
  const Eigen::MatrixXd& B_d = table.map(1).B;
  require_stabilizable(A_d, B_d);

  // Cross-weighted cost blocks from Gamma(delta).
  const Eigen::MatrixXd& G = table.kernel(1);
  const Eigen::MatrixXd Qc = G.topLeftCorner(n, n);
  const Eigen::MatrixXd S = G.topRightCorner(n, m);
  const Eigen::MatrixXd Rc = G.bottomRightCorner(m, m);

  // Fixed-point iteration on the discrete algebraic Riccati equation.
  Eigen::MatrixXd P = Qc;
  bool converged = false;
  constexpr int kMaxIterations = 100000;
  for (int it = 0; it < kMaxIterations; ++it) {
    const Eigen::MatrixXd gain_den = Rc + B_d.transpose() * P * B_d;
    const Eigen::MatrixXd gain_num = B_d.transpose() * P * A_d + S.transpose();
    Eigen::MatrixXd P_next = Qc + A_d.transpose() * P * A_d -
                             gain_num.transpose() * gain_den.llt().solve(gain_num);
    P_next = 0.5 * (P_next + P_next.transpose());
    const double diff = (P_next - P).cwiseAbs().maxCoeff();
    P = P_next;
    if (diff < 1e-12) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NumericalFailureError(
        "synthesize_terminal: Riccati fixed-point iteration did not converge within " +
        std::to_string(kMaxIterations) + " iterations");
  }

  const Eigen::MatrixXd gain_den = Rc + B_d.transpose() * P * B_d;
  const Eigen::MatrixXd K = -gain_den.llt().solve(B_d.transpose() * P * A_d + S.transpose());

  // Largest epsilon with K x inside the input box for every x in Phi:
  // sup_{x^T P x <= eps} |K_j x| = sqrt(eps K_j P^-1 K_j^T).
  const Eigen::LLT<Eigen::MatrixXd> P_llt(P);
  double epsilon = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j) {
    const Eigen::VectorXd row = K.row(j).transpose();
    const double quad = row.dot(P_llt.solve(row));
    if (quad > 1e-300) {
      epsilon = std::min(epsilon, sys.u_bounds[j] * sys.u_bounds[j] / quad);
    }
  }
  if (!std::isfinite(epsilon)) {
    // K == 0 (stable plant with no cross coupling): the input constraint is
    // vacuous on any level set, pick a unit level.
    epsilon = 1.0;
  }

  TerminalIngredients ing{K, P, epsilon, table.delta()};
  ing.validate(n, m);
  return ing;
}

TerminalReport verify_terminal(const TerminalIngredients& ing, const LinearSystem& sys,
                               const CostWeights& weights, const DiscretizationTable& table,
                               int n_samples, std::uint64_t seed) {
  const int n = sys.state_dim();
  const int m = sys.input_dim();
  TerminalReport report;
  report.samples = n_samples;

  const Eigen::MatrixXd& A_d = table.map(1).A;
  const Eigen::MatrixXd& B_d = table.map(1).B;
  const Eigen::MatrixXd A_cl = A_d + B_d * ing.K;
  const Eigen::MatrixXd& G = table.kernel(1);

  Eigen::MatrixXd lift(n + m, n);  // [I; K]
  lift.topRows(n) = Eigen::MatrixXd::Identity(n, n);
  lift.bottomRows(m) = ing.K;
  const Eigen::MatrixXd M_K = lift.transpose() * G * lift;

  const Eigen::MatrixXd lyap =
      A_cl.transpose() * ing.P_f * A_cl - ing.P_f + M_K;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (lyap + lyap.transpose()),
                                                    Eigen::EigenvaluesOnly);
  report.lyapunov_max_eigenvalue = es.eigenvalues().maxCoeff();

  // Analytic worst-case input margin over Phi.
  const Eigen::LLT<Eigen::MatrixXd> P_llt(ing.P_f);
  double margin = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j) {
    const Eigen::VectorXd row = ing.K.row(j).transpose();
    const double peak = std::sqrt(std::max(0.0, ing.epsilon * row.dot(P_llt.solve(row))));
    margin = std::min(margin, sys.u_bounds[j] - peak);
  }
  report.input_margin = margin;

  // Sampled check of the decrease condition on and inside the boundary.
  // Boundary points: x = sqrt(eps) L^-T y with y uniform on the unit sphere
  // and P_f = L L^T; interior points scale those by a uniform radius.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Eigen::MatrixXd L = P_llt.matrixL();
  double worst_decrease = -std::numeric_limits<double>::infinity();
  double worst_input = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < n_samples; ++s) {
    Eigen::VectorXd y(n);
    for (int k = 0; k < n; ++k) y[k] = gauss(rng);
    if (y.norm() < 1e-12) y[0] = 1.0;
    y.normalize();
    const double radius = (s % 2 == 0) ? 1.0 : unif(rng);
    const Eigen::VectorXd x =
        std::sqrt(ing.epsilon) * radius *
        L.transpose().triangularView<Eigen::Upper>().solve(y);
    const Eigen::VectorXd u = ing.K * x;
    const Eigen::VectorXd x_next = A_cl * x;
    const double decrease = x_next.dot(ing.P_f * x_next) - x.dot(ing.P_f * x) +
                            stage_cost(x, u, G);
    worst_decrease = std::max(worst_decrease, decrease);
    for (int j = 0; j < m; ++j) {
      worst_input = std::max(worst_input, std::abs(u[j]) - sys.u_bounds[j]);
    }
  }
  report.sampled_decrease_violation = worst_decrease;
  report.sampled_input_violation = worst_input;

  // The sampled comparison differences values of size up to epsilon, so its
  // round-off floor grows with the ellipsoid; slack scales accordingly.
  const double sampled_slack = 1e-9 * std::max(1.0, ing.epsilon);
  report.pass = report.lyapunov_max_eigenvalue <= 1e-10 && report.input_margin >= -1e-9 &&
                report.sampled_decrease_violation <= sampled_slack &&
                report.sampled_input_violation <= 1e-9 * std::max(1.0, sys.u_bounds.maxCoeff());
  (void)weights;
  return report;
}

std::string TerminalReport::summary() const {
  std::ostringstream out;
  out << (pass ? "PASS" : "FAIL") << ": lyapunov_max_eig = " << lyapunov_max_eigenvalue
      << " (tol 1e-10), input_margin = " << input_margin
      << ", sampled decrease violation = " << sampled_decrease_violation
      << ", sampled input violation = " << sampled_input_violation << " over " << samples
      << " samples";
  return out.str();
}

}  // namespace stmpc
