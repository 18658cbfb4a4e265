#include "stmpc/box_qp.hpp"

#include <string>
#include <vector>

namespace stmpc {
namespace {

// Minimize over the free coordinates with the bounded ones held fixed;
// returns the Newton step d (zero on bounded coordinates).
Eigen::VectorXd free_step(const Eigen::MatrixXd& H, const Eigen::VectorXd& grad,
                          const Eigen::VectorXi& active) {
  const int nv = static_cast<int>(grad.size());
  std::vector<int> free_idx;
  free_idx.reserve(nv);
  for (int j = 0; j < nv; ++j) {
    if (active[j] == 0) free_idx.push_back(j);
  }
  Eigen::VectorXd d = Eigen::VectorXd::Zero(nv);
  const int nf = static_cast<int>(free_idx.size());
  if (nf == 0) return d;
  Eigen::MatrixXd Hff(nf, nf);
  Eigen::VectorXd gf(nf);
  for (int a = 0; a < nf; ++a) {
    gf[a] = grad[free_idx[a]];
    for (int b = 0; b < nf; ++b) Hff(a, b) = H(free_idx[a], free_idx[b]);
  }
  Eigen::LLT<Eigen::MatrixXd> llt(Hff);
  if (llt.info() != Eigen::Success) {
    throw NumericalFailureError("solve_box_qp: free-block factorization failed (H not PD?)");
  }
  const Eigen::VectorXd df = llt.solve(-gf);
  for (int a = 0; a < nf; ++a) d[free_idx[a]] = df[a];
  return d;
}

}  // namespace

BoxQpResult solve_box_qp(const Eigen::MatrixXd& H, const Eigen::VectorXd& g,
                         const Eigen::VectorXd& lb, const Eigen::VectorXd& ub,
                         const Eigen::VectorXi* warm_active) {
  const int nv = static_cast<int>(g.size());
  if (H.rows() != nv || H.cols() != nv || lb.size() != nv || ub.size() != nv) {
    throw InvalidInputError("solve_box_qp: inconsistent dimensions");
  }
  for (int j = 0; j < nv; ++j) {
    if (!(lb[j] <= ub[j])) {
      throw InvalidInputError("solve_box_qp: empty box at coordinate " + std::to_string(j));
    }
  }

  Eigen::VectorXi active = Eigen::VectorXi::Zero(nv);
  Eigen::VectorXd z(nv);
  if (warm_active != nullptr && warm_active->size() == nv) {
    active = *warm_active;
  }
  for (int j = 0; j < nv; ++j) {
    z[j] = active[j] > 0 ? ub[j] : (active[j] < 0 ? lb[j] : std::clamp(0.0, lb[j], ub[j]));
  }

  constexpr double kMultiplierTol = 1e-11;
  const int max_iterations = 50 + 10 * nv;
  BoxQpResult result;
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::VectorXd grad = H * z + g;
    Eigen::VectorXd d = free_step(H, grad, active);

    if (d.cwiseAbs().maxCoeff() > 1e-14 * std::max(1.0, z.cwiseAbs().maxCoeff())) {
      // Step toward the free-block minimizer, stopping at the first bound hit.
      double alpha = 1.0;
      int blocking = -1, side = 0;
      for (int j = 0; j < nv; ++j) {
        if (active[j] != 0 || d[j] == 0.0) continue;
        if (d[j] > 0.0 && z[j] + alpha * d[j] > ub[j]) {
          alpha = (ub[j] - z[j]) / d[j];
          blocking = j;
          side = +1;
        } else if (d[j] < 0.0 && z[j] + alpha * d[j] < lb[j]) {
          alpha = (lb[j] - z[j]) / d[j];
          blocking = j;
          side = -1;
        }
      }
      z += alpha * d;
      if (blocking >= 0) {
        z[blocking] = side > 0 ? ub[blocking] : lb[blocking];
        active[blocking] = side;
        continue;
      }
    }

    // At the minimizer of the current working set; release the most negative
    // multiplier, or stop if none.
    grad = H * z + g;
    double worst = kMultiplierTol;
    int release = -1;
    for (int j = 0; j < nv; ++j) {
      if (active[j] == 0) continue;
      const double violation = active[j] > 0 ? grad[j] : -grad[j];
      if (violation > worst) {
        worst = violation;
        release = j;
      }
    }
    if (release < 0) {
      result.z = z;
      result.active = active;
      result.iterations = it + 1;
      double res = 0.0;
      for (int j = 0; j < nv; ++j) {
        if (active[j] == 0) {
          res = std::max(res, std::abs(grad[j]));
        } else {
          res = std::max(res, std::max(0.0, active[j] > 0 ? grad[j] : -grad[j]));
        }
      }
      result.stationarity_residual = res;
      return result;
    }
    active[release] = 0;
  }
  throw NumericalFailureError("solve_box_qp: iteration cap (" + std::to_string(max_iterations) +
                              ") exceeded");
}

}  // namespace stmpc
