#include "stmpc/ocp.hpp"

#include <cmath>
#include <exception>
#include <string>

namespace stmpc {
namespace {

constexpr double kConstraintTol = 1e-8;
constexpr double kMultiplierCap = 1e14;

// Interval-length index (in units of delta) of step j of pattern i.
inline int step_kernel_index(const SamplingPattern& p, int j) { return j == 0 ? p.index : 1; }

double terminal_value(const Eigen::MatrixXd& Mq, const Eigen::VectorXd& bq, double cq,
                      const Eigen::VectorXd& z) {
  return z.dot(Mq * z) + 2.0 * bq.dot(z) + cq;
}

}  // namespace

std::vector<double> SamplingPattern::intervals(double delta) const {
  std::vector<double> out(static_cast<std::size_t>(steps), delta);
  out[0] = index * delta;
  return out;
}

SamplingPattern SamplingPattern::make(int i, int n_intervals, int n_patterns) {
  if (i < 1 || i > n_patterns || n_patterns >= n_intervals) {
    throw InvalidInputError("SamplingPattern: need 1 <= i <= M < N_p");
  }
  return SamplingPattern{i, n_intervals - i + 1};
}

OCPFamily::OCPFamily(const DiscretizationTable& table, const CostWeights& weights,
                     const TerminalIngredients& terminal)
    : table_(&table), weights_(&weights), terminal_(&terminal) {
  const int n = table.system().state_dim();
  const int m = table.system().input_dim();
  terminal.validate(n, m);

  pattern_data_.reserve(table.patterns());
  for (int i = 1; i <= table.patterns(); ++i) {
    const SamplingPattern pattern = SamplingPattern::make(i, table.intervals(), table.patterns());
    const int N = pattern.steps;
    const int nv = m * N;

    // Blockwise elimination of the dynamics: x_j = X_j x0 + U_j z.
    std::vector<Eigen::MatrixXd> X(N + 1), U(N + 1);
    X[0] = Eigen::MatrixXd::Identity(n, n);
    U[0] = Eigen::MatrixXd::Zero(n, nv);
    for (int j = 0; j < N; ++j) {
      const DiscreteMap& map = table.map(step_kernel_index(pattern, j));
      X[j + 1] = map.A * X[j];
      U[j + 1] = map.A * U[j];
      U[j + 1].middleCols(j * m, m) += map.B;
    }

    Eigen::MatrixXd Ht = Eigen::MatrixXd::Zero(nv, nv);
    Eigen::MatrixXd Gx = Eigen::MatrixXd::Zero(nv, n);
    Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
    for (int j = 0; j < N; ++j) {
      const Eigen::MatrixXd& G = table.kernel(step_kernel_index(pattern, j));
      const auto Gxx = G.topLeftCorner(n, n);
      const auto Gxu = G.topRightCorner(n, m);
      const auto Guu = G.bottomRightCorner(m, m);
      const Eigen::MatrixXd cross = U[j].transpose() * Gxu;  // nv x m
      Ht += U[j].transpose() * Gxx * U[j];
      Ht.middleCols(j * m, m) += cross;
      Ht.middleRows(j * m, m) += cross.transpose();
      Ht.block(j * m, j * m, m, m) += Guu;
      Gx += U[j].transpose() * Gxx * X[j];
      Gx.middleRows(j * m, m) += Gxu.transpose() * X[j];
      C += X[j].transpose() * Gxx * X[j];
    }
    Ht += U[N].transpose() * terminal.P_f * U[N];
    Gx += U[N].transpose() * terminal.P_f * X[N];
    C += X[N].transpose() * terminal.P_f * X[N];

    PatternMatrices pm;
    pm.pattern = pattern;
    pm.hessian = Ht + Ht.transpose();  // H = 2 Ht, symmetrized
    pm.gradient_map = 2.0 * Gx;
    pm.offset_quad = 0.5 * (C + C.transpose());
    pm.terminal_from_x0 = X[N];
    pm.terminal_from_inputs = U[N];
    pm.lower.resize(nv);
    pm.upper.resize(nv);
    for (int j = 0; j < N; ++j) {
      pm.upper.segment(j * m, m) = table.system().u_bounds;
      pm.lower.segment(j * m, m) = -table.system().u_bounds;
    }
    pattern_data_.push_back(std::move(pm));
  }
}

OCPData OCPFamily::instantiate(int pattern_index, const Eigen::VectorXd& x0) const {
  const int n = table_->system().state_dim();
  if (x0.size() != n || !x0.allFinite()) {
    throw InvalidInputError("OCPFamily: x0 must be a finite n-vector");
  }
  const PatternMatrices& pm = pattern_data_.at(pattern_index - 1);
  OCPData data;
  data.pattern = pm.pattern;
  data.hessian = pm.hessian;
  data.gradient = pm.gradient_map * x0;
  data.cost_offset = x0.dot(pm.offset_quad * x0);
  data.terminal_from_x0 = pm.terminal_from_x0;
  data.terminal_from_inputs = pm.terminal_from_inputs;
  data.P_f = terminal_->P_f;
  data.epsilon = terminal_->epsilon;
  data.lower = pm.lower;
  data.upper = pm.upper;
  data.x0 = x0;
  data.table = table_;
  return data;
}

PatternSolution OCPFamily::solve(int pattern_index, const Eigen::VectorXd& x0) const {
  return solve_ocp(instantiate(pattern_index, x0));
}

std::vector<PatternSolution> OCPFamily::solve_all(const Eigen::VectorXd& x0,
                                                  Execution exec) const {
  const int M = table_->patterns();
  std::vector<PatternSolution> solutions(static_cast<std::size_t>(M));
  if (exec == Execution::parallel) {
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 1; i <= M; ++i) {
      try {
        solutions[i - 1] = solve(i, x0);
      } catch (...) {
#pragma omp critical
        {
          if (!failure) failure = std::current_exception();
        }
      }
    }
    if (failure) std::rethrow_exception(failure);
  } else {
    for (int i = 1; i <= M; ++i) {
      solutions[i - 1] = solve(i, x0);
    }
  }
  return solutions;
}

OCPData build_ocp(const DiscretizationTable& table, const CostWeights& weights,
                  const TerminalIngredients& terminal, const SamplingPattern& pattern,
                  const Eigen::VectorXd& x0) {
  return OCPFamily(table, weights, terminal).instantiate(pattern.index, x0);
}

PatternSolution solve_ocp(const OCPData& data) {
  const DiscretizationTable& table = *data.table;
  const int m = table.system().input_dim();
  const int N = data.pattern.steps;

  const Eigen::VectorXd xN_drift = data.terminal_from_x0 * data.x0;
  const Eigen::MatrixXd Mq =
      data.terminal_from_inputs.transpose() * data.P_f * data.terminal_from_inputs;
  const Eigen::VectorXd bq = data.terminal_from_inputs.transpose() * (data.P_f * xN_drift);
  const double cq = xN_drift.dot(data.P_f * xN_drift) - data.epsilon;

  PatternSolution sol;
  sol.pattern = data.pattern;

  BoxQpResult qp = solve_box_qp(data.hessian, data.gradient, data.lower, data.upper);
  double lambda = 0.0;
  double cviol = terminal_value(Mq, bq, cq, qp.z);

  if (cviol > kConstraintTol) {
    // The terminal ellipsoid binds: locate the multiplier of the single
    // quadratic constraint by bisection; every inner problem is a box QP with
    // Hessian H + 2 lambda Mq, warm-started from the neighbouring working set.
    double lam_lo = 0.0;
    double lam_hi = 1.0;
    Eigen::VectorXi warm = qp.active;
    bool bracketed = false;
    for (int round = 0; round < 64 && !bracketed; ++round) {
      qp = solve_box_qp(data.hessian + 2.0 * lam_hi * Mq,
                        data.gradient + 2.0 * lam_hi * bq, data.lower, data.upper, &warm);
      warm = qp.active;
      cviol = terminal_value(Mq, bq, cq, qp.z);
      if (cviol <= kConstraintTol) {
        bracketed = true;
        break;
      }
      lam_lo = lam_hi;
      lam_hi *= 10.0;
      if (lam_hi > kMultiplierCap) break;
    }

    if (!bracketed) {
      // Certify: minimize the terminal value itself over the box (tiny ridge
      // keeps the Hessian definite; the bias is far below the tolerance).
      const double ridge = 1e-12 * (1.0 + Mq.cwiseAbs().maxCoeff());
      const Eigen::MatrixXd Hc =
          2.0 * Mq + ridge * Eigen::MatrixXd::Identity(Mq.rows(), Mq.cols());
      const BoxQpResult cert = solve_box_qp(Hc, 2.0 * bq, data.lower, data.upper);
      const double excess = terminal_value(Mq, bq, cq, cert.z);
      if (excess > kConstraintTol) {
        sol.status = SolveStatus::infeasible;
        sol.cost = std::numeric_limits<double>::infinity();
        sol.terminal_excess = excess;
        return sol;
      }
      // Feasible only at (numerically) a single point.
      qp = cert;
      cviol = excess;
      lambda = lam_hi;
    } else {
      for (int it = 0; it < 200; ++it) {
        const double target = std::min(kConstraintTol, 1e-9 / std::max(1.0, lam_hi));
        if (cviol >= -target) break;
        if (lam_hi - lam_lo <= 1e-15 * lam_hi) break;
        const double lam_mid = 0.5 * (lam_lo + lam_hi);
        const BoxQpResult mid =
            solve_box_qp(data.hessian + 2.0 * lam_mid * Mq,
                         data.gradient + 2.0 * lam_mid * bq, data.lower, data.upper, &warm);
        warm = mid.active;
        const double c_mid = terminal_value(Mq, bq, cq, mid.z);
        if (c_mid > kConstraintTol) {
          lam_lo = lam_mid;
        } else {
          lam_hi = lam_mid;
          qp = mid;
          cviol = c_mid;
        }
      }
      lambda = lam_hi;
    }
  }

  const Eigen::VectorXd& z = qp.z;
  sol.cost = 0.5 * z.dot(data.hessian * z) + data.gradient.dot(z) + data.cost_offset;
  sol.multiplier = lambda;
  sol.constraint_residual = std::max(0.0, cviol);

  // KKT stationarity of the Lagrangian over the box.
  const Eigen::VectorXd grad_L =
      data.hessian * z + data.gradient + 2.0 * lambda * (Mq * z + bq);
  double kkt = std::abs(lambda) * std::abs(std::min(0.0, cviol));
  for (int j = 0; j < z.size(); ++j) {
    if (qp.active[j] == 0) {
      kkt = std::max(kkt, std::abs(grad_L[j]));
    } else {
      kkt = std::max(kkt, std::max(0.0, qp.active[j] > 0 ? grad_L[j] : -grad_L[j]));
    }
  }
  sol.kkt_residual = kkt;

  sol.u_seq.resize(static_cast<std::size_t>(N));
  sol.x_seq.resize(static_cast<std::size_t>(N) + 1);
  sol.x_seq[0] = data.x0;
  for (int j = 0; j < N; ++j) {
    sol.u_seq[j] = z.segment(j * m, m);
    const DiscreteMap& map = table.map(step_kernel_index(data.pattern, j));
    sol.x_seq[j + 1] = map.A * sol.x_seq[j] + map.B * sol.u_seq[j];
  }
  return sol;
}

double evaluate_cost(const DiscretizationTable& table, const CostWeights& weights,
                     const TerminalIngredients& terminal, const SamplingPattern& pattern,
                     const Eigen::VectorXd& x0, const std::vector<Eigen::VectorXd>& u_seq) {
  (void)weights;
  const int n = table.system().state_dim();
  const int m = table.system().input_dim();
  if (x0.size() != n) {
    throw InvalidInputError("evaluate_cost: x0 must be an n-vector");
  }
  if (static_cast<int>(u_seq.size()) != pattern.steps) {
    throw InvalidInputError("evaluate_cost: expected " + std::to_string(pattern.steps) +
                            " inputs, got " + std::to_string(u_seq.size()));
  }
  double cost = 0.0;
  Eigen::VectorXd x = x0;
  for (int j = 0; j < pattern.steps; ++j) {
    if (u_seq[j].size() != m) {
      throw InvalidInputError("evaluate_cost: input " + std::to_string(j) + " has wrong size");
    }
    const int idx = step_kernel_index(pattern, j);
    cost += stage_cost(x, u_seq[j], table.kernel(idx));
    const DiscreteMap& map = table.map(idx);
    x = map.A * x + map.B * u_seq[j];
  }
  cost += x.dot(terminal.P_f * x);
  return cost;
}

std::vector<PatternSolution> solve_all_patterns(const DiscretizationTable& table,
                                                const CostWeights& weights,
                                                const TerminalIngredients& terminal,
                                                const Eigen::VectorXd& x0, Execution exec) {
  return OCPFamily(table, weights, terminal).solve_all(x0, exec);
}

}  // namespace stmpc
