#pragma once

#include <Eigen/Dense>
#include <vector>

#include "stmpc/box_qp.hpp"
#include "stmpc/discretization.hpp"
#include "stmpc/execution.hpp"
#include "stmpc/terminal_set.hpp"

namespace stmpc {

/// Input grid whose first hold interval is i delta followed by uniform delta
/// intervals; the transmission interval of pattern i equals i delta.
struct SamplingPattern {
  int index = 0;  ///< i in 1..M
  int steps = 0;  ///< N_i = N_p - i + 1 input samples

  /// [i delta, delta, ..., delta], summing exactly to the horizon.
  std::vector<double> intervals(double delta) const;

  static SamplingPattern make(int i, int n_intervals, int n_patterns);
};

enum class SolveStatus { optimal, infeasible };

/// Optimal input/state sequences and cost for one pattern, plus solver
/// diagnostics. On `infeasible`, cost is +inf, the sequences are empty, and
/// `terminal_excess` certifies how far the best reachable terminal value is
/// above epsilon.
struct PatternSolution {
  SamplingPattern pattern;
  std::vector<Eigen::VectorXd> u_seq;  ///< N_i inputs
  std::vector<Eigen::VectorXd> x_seq;  ///< N_i + 1 states, x_seq[0] = x0
  double cost = 0.0;
  SolveStatus status = SolveStatus::optimal;

  double kkt_residual = 0.0;
  double constraint_residual = 0.0;  ///< terminal-constraint violation at the solution
  double multiplier = 0.0;           ///< terminal-constraint dual value
  double terminal_excess = 0.0;      ///< infeasibility certificate (0 when feasible)

  bool feasible() const { return status == SolveStatus::optimal; }
};

/// Condensed quadratic program for one pattern and initial state:
///   min 1/2 z^T H z + g^T z + c0
///   s.t. lower <= z <= upper,  (Tx x0 + Tu z)^T P_f (Tx x0 + Tu z) <= epsilon,
/// where z stacks the N_i input samples and the dynamics have been
/// eliminated blockwise.
struct OCPData {
  SamplingPattern pattern;
  Eigen::MatrixXd hessian;
  Eigen::VectorXd gradient;
  double cost_offset = 0.0;
  Eigen::MatrixXd terminal_from_x0;      ///< Tx
  Eigen::MatrixXd terminal_from_inputs;  ///< Tu
  Eigen::MatrixXd P_f;
  double epsilon = 0.0;
  Eigen::VectorXd lower, upper;
  Eigen::VectorXd x0;
  const DiscretizationTable* table = nullptr;
};

/// Pattern-static condensed matrices for all M problems; the per-step bind of
/// x0 is cheap, so one family serves every closed-loop step.
class OCPFamily {
 public:
  OCPFamily(const DiscretizationTable& table, const CostWeights& weights,
            const TerminalIngredients& terminal);

  OCPData instantiate(int pattern_index, const Eigen::VectorXd& x0) const;
  PatternSolution solve(int pattern_index, const Eigen::VectorXd& x0) const;

  /// Solves the M independent problems, in pattern order. Under
  /// Execution::parallel the solves run in an OpenMP loop with no shared
  /// mutable state; results are identical to the serial policy.
  std::vector<PatternSolution> solve_all(const Eigen::VectorXd& x0,
                                         Execution exec = Execution::parallel) const;

  const DiscretizationTable& table() const { return *table_; }
  const TerminalIngredients& terminal() const { return *terminal_; }
  const CostWeights& weights() const { return *weights_; }

 private:
  struct PatternMatrices {
    SamplingPattern pattern;
    Eigen::MatrixXd hessian;        // H
    Eigen::MatrixXd gradient_map;   // g = 2 Gx x0
    Eigen::MatrixXd offset_quad;    // c0 = x0^T C x0
    Eigen::MatrixXd terminal_from_x0;
    Eigen::MatrixXd terminal_from_inputs;
    Eigen::VectorXd lower, upper;
  };

  const DiscretizationTable* table_;
  const CostWeights* weights_;
  const TerminalIngredients* terminal_;
  std::vector<PatternMatrices> pattern_data_;
};

/// Assembles the condensed program for one pattern (see OCPData).
OCPData build_ocp(const DiscretizationTable& table, const CostWeights& weights,
                  const TerminalIngredients& terminal, const SamplingPattern& pattern,
                  const Eigen::VectorXd& x0);

/// Global minimizer of the condensed program. The box problem is solved by a
/// primal active-set method; when the terminal ellipsoid binds, the single
/// multiplier is located by bisection on the dual, each inner problem being a
/// box QP again. Infeasibility is certified by minimizing the terminal value
/// itself over the box. Throws NumericalFailureError if an inner solve fails.
PatternSolution solve_ocp(const OCPData& data);

/// Cost of a candidate input sequence by explicit rollout: sums the per-step
/// kernel forms plus the terminal quadratic. Independent of the condensed
/// assembly; serves as its oracle. Throws InvalidInputError on bad lengths.
double evaluate_cost(const DiscretizationTable& table, const CostWeights& weights,
                     const TerminalIngredients& terminal, const SamplingPattern& pattern,
                     const Eigen::VectorXd& x0, const std::vector<Eigen::VectorXd>& u_seq);

/// One-shot convenience wrapper around OCPFamily::solve_all.
std::vector<PatternSolution> solve_all_patterns(const DiscretizationTable& table,
                                                const CostWeights& weights,
                                                const TerminalIngredients& terminal,
                                                const Eigen::VectorXd& x0,
                                                Execution exec = Execution::parallel);

}  // namespace stmpc
