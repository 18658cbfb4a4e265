#include "stmpc/verification.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "stmpc/reference.hpp"

namespace stmpc {
namespace {

CheckResult residual_check(std::string name, double measured, double threshold,
                           std::string detail = {}) {
  CheckResult check;
  check.name = std::move(name);
  check.measured = measured;
  check.threshold = threshold;
  check.pass = measured <= threshold;
  check.detail = std::move(detail);
  return check;
}

double relative_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff() / std::max(1.0, b.cwiseAbs().maxCoeff());
}

}  // namespace

bool VerificationReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.pass; });
}

void VerificationReport::print(std::ostream& out) const {
  for (const CheckResult& c : checks) {
    out << (c.pass ? "[PASS] " : "[FAIL] ") << c.name << ": measured " << c.measured
        << " (threshold " << c.threshold << ")";
    if (!c.detail.empty()) out << " -- " << c.detail;
    out << "\n";
  }
}

std::vector<Eigen::VectorXd> shifted_candidate(const PatternSolution& previous,
                                               const TerminalIngredients& terminal,
                                               const DiscretizationTable& table) {
  const int n_p = table.intervals();
  const int i_prev = previous.pattern.index;
  std::vector<Eigen::VectorXd> inputs;
  inputs.reserve(static_cast<std::size_t>(n_p));

  // Tail of the previous sequence covers the first N_p - i_prev steps; the
  // local feedback takes over once the previous terminal state is reached.
  for (int j = 1; j < previous.pattern.steps; ++j) {
    inputs.push_back(previous.u_seq[static_cast<std::size_t>(j)]);
  }
  Eigen::VectorXd x = previous.x_seq.back();
  for (int j = 0; j < i_prev; ++j) {
    const Eigen::VectorXd u = terminal.K * x;
    inputs.push_back(u);
    x = table.map(1).A * x + table.map(1).B * u;
  }
  return inputs;
}

VerificationReport run_invariant_suite(const SimulationEngine& engine, std::uint64_t seed) {
  VerificationReport report;
  const SimulationConfig& cfg = engine.config();
  const DiscretizationTable& table = engine.table();
  const LinearSystem& sys = cfg.sys;
  const CostWeights& weights = cfg.weights;
  const int n = sys.state_dim();
  const int m = sys.input_dim();
  const int M = table.patterns();
  std::mt19937_64 rng(seed);

  // Exponential versus the truncated Taylor oracle near the origin.
  {
    const double a_norm = sys.A.cwiseAbs().maxCoeff() * n;
    const double t = std::min(cfg.delta, 0.9 / std::max(1.0, a_norm));
    const double err = relative_diff(matrix_exponential(sys.A, t),
                                     reference::matrix_exponential_taylor(sys.A, t));
    report.checks.push_back(residual_check("matrix-exponential-vs-taylor-oracle", err, 1e-12));
  }

  // Discrete maps versus adaptive 8th-order integration, short and long step.
  {
    double worst = 0.0;
    for (int i : {1, M}) {
      const DiscreteMap ode = reference::discretize_ode(sys, i * cfg.delta);
      worst = std::max(worst, relative_diff(table.map(i).A, ode.A));
      worst = std::max(worst, relative_diff(table.map(i).B, ode.B));
    }
    report.checks.push_back(residual_check("discretize-vs-ode-oracle", worst, 1e-8));
  }

  // Kernels versus a dense composite-trapezoid oracle.
  {
    double worst = 0.0;
    for (int i : {1, M}) {
      const Eigen::MatrixXd oracle =
          reference::stage_cost_kernel_trapezoid(sys, weights, i * cfg.delta, 1e-5);
      worst = std::max(worst, (table.kernel(i) - oracle).cwiseAbs().maxCoeff());
    }
    report.checks.push_back(residual_check("kernel-vs-trapezoid-oracle", worst, 1e-9));
  }

  // Kernel definiteness and the semigroup / cost-splitting identities.
  {
    double min_eig = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= M; ++i) min_eig = std::min(min_eig, min_eigenvalue(table.kernel(i)));
    report.checks.push_back(residual_check("kernel-positive-definite", -min_eig, -1e-12,
                                           "negated min eigenvalue over all tabulated kernels"));
  }
  {
    double worst = 0.0;
    for (int i = 2; i <= M; ++i) {
      const DiscreteMap& one = table.map(1);
      const DiscreteMap& prev = table.map(i - 1);
      worst = std::max(worst, relative_diff(table.map(i).A, one.A * prev.A));
      worst = std::max(worst,
                       relative_diff(table.map(i).B, Eigen::MatrixXd(one.A * prev.B + one.B)));
    }
    report.checks.push_back(residual_check("semigroup-identity", worst, 1e-10));
  }
  {
    std::normal_distribution<double> gauss(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 32; ++trial) {
      Eigen::VectorXd x(n), u(m);
      for (int i = 0; i < n; ++i) x[i] = gauss(rng);
      for (int j = 0; j < m; ++j) u[j] = gauss(rng);
      for (int i = 2; i <= M; ++i) {
        const double whole = stage_cost(x, u, table.kernel(i));
        const Eigen::VectorXd x_mid = table.map(i - 1).A * x + table.map(i - 1).B * u;
        const double split =
            stage_cost(x, u, table.kernel(i - 1)) + stage_cost(x_mid, u, table.kernel(1));
        worst = std::max(worst, std::abs(whole - split) / std::max(1.0, std::abs(whole)));
      }
    }
    report.checks.push_back(residual_check("cost-splitting-identity", worst, 1e-9));
  }

  // Terminal ingredients.
  const TerminalReport terminal_report =
      verify_terminal(engine.terminal(), sys, weights, table, 1000, seed);
  report.checks.push_back(residual_check("terminal-lyapunov-max-eigenvalue",
                                         terminal_report.lyapunov_max_eigenvalue, 1e-10));
  report.checks.push_back(residual_check("terminal-input-margin", -terminal_report.input_margin,
                                         1e-9, "negated analytic margin; >= 0 required"));
  report.checks.push_back(residual_check(
      "terminal-sampled-decrease",
      std::max(terminal_report.sampled_decrease_violation,
               terminal_report.sampled_input_violation),
      1e-9, "worst sampled Lyapunov/input violation over the ellipsoid"));

  // Closed-loop invariants along a full self-triggered run.
  SimulationTrace trace;
  bool contract_ok = true;
  std::string contract_detail = "no scheduling contract violation raised";
  try {
    trace = engine.run(SimulationMode::self_triggered);
  } catch (const Error& err) {
    contract_ok = false;
    contract_detail = err.what();
  }
  {
    CheckResult check;
    check.name = "closed-loop-run";
    check.pass = contract_ok;
    check.measured = contract_ok ? 0.0 : 1.0;
    check.threshold = 0.0;
    check.detail = contract_detail;
    report.checks.push_back(check);
  }
  if (!contract_ok) return report;

  {
    // Cost chain over feasible patterns at every full-solve event.
    double worst = -std::numeric_limits<double>::infinity();
    double worst_nesting = -std::numeric_limits<double>::infinity();
    for (std::size_t e = 1; e < trace.events.size(); ++e) {
      const TraceEvent& ev = trace.events[e];
      for (int i = 0; i + 1 < M; ++i) {
        if (ev.feasible[i] && ev.feasible[i + 1]) {
          worst = std::max(worst, ev.costs[i] - ev.costs[i + 1]);
        }
        // Feasibility nesting: i+1 feasible must imply i feasible.
        if (ev.feasible[i + 1] && !ev.feasible[i]) worst_nesting = 1.0;
      }
    }
    report.checks.push_back(residual_check("cost-chain-monotone",
                                           std::max(worst, 0.0), 1e-6,
                                           "worst J*_i - J*_{i+1} over feasible pairs"));
    report.checks.push_back(residual_check("feasible-set-nested",
                                           std::max(worst_nesting, 0.0), 0.0));
  }

  {
    // Shifted-candidate decrease at every event, and pattern-1 availability.
    double worst = -std::numeric_limits<double>::infinity();
    double worst_constraint = 0.0;
    bool availability = true;
    for (std::size_t e = 1; e < trace.events.size(); ++e) {
      const TraceEvent& prev_ev = trace.events[e - 1];
      const TraceEvent& ev = trace.events[e];
      if (!ev.flags[0].cost_gap_ok || !ev.flags[0].decrease_ok) availability = false;

      const std::vector<Eigen::VectorXd> candidate =
          shifted_candidate(prev_ev.selected, engine.terminal(), table);
      const SamplingPattern pattern1 = SamplingPattern::make(1, table.intervals(), M);
      const Eigen::VectorXd x_now = ev.selected.x_seq.front();
      for (const Eigen::VectorXd& u : candidate) {
        worst_constraint = std::max(
            worst_constraint, (u.cwiseAbs() - sys.u_bounds).maxCoeff());
      }
      Eigen::VectorXd x = x_now;
      for (const Eigen::VectorXd& u : candidate) {
        x = table.map(1).A * x + table.map(1).B * u;
      }
      worst_constraint = std::max(
          worst_constraint, x.dot(engine.terminal().P_f * x) - engine.terminal().epsilon);

      const double candidate_cost = evaluate_cost(table, weights, engine.terminal(), pattern1,
                                                  x_now, candidate);
      const double bound = prev_ev.selected.cost - prev_ev.applied_decrement;
      worst = std::max(worst, candidate_cost - bound);
    }
    report.checks.push_back(residual_check("shifted-candidate-decrease", std::max(worst, 0.0),
                                           1e-6,
                                           "worst J_1(candidate) - (prev J* - F applied)"));
    report.checks.push_back(residual_check("shifted-candidate-admissible", worst_constraint,
                                           1e-8));
    CheckResult avail;
    avail.name = "pattern-1-availability";
    avail.pass = availability;
    avail.measured = availability ? 0.0 : 1.0;
    avail.threshold = 0.0;
    avail.detail = "both scheduling conditions hold for pattern 1 at every event";
    report.checks.push_back(avail);
  }

  {
    // Lyapunov decrease of the selected-cost sequence.
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t e = 1; e < trace.events.size(); ++e) {
      const TraceEvent& prev_ev = trace.events[e - 1];
      const double bound =
          prev_ev.selected.cost - cfg.trigger.gamma * prev_ev.applied_decrement;
      worst = std::max(worst, trace.events[e].selected.cost - bound);
    }
    report.checks.push_back(residual_check("selected-cost-decrease", std::max(worst, 0.0),
                                           1e-6));
  }

  {
    // Solver cost against the rollout oracle, and solution admissibility.
    double worst_cost = 0.0;
    double worst_admis = 0.0;
    for (const TraceEvent& ev : trace.events) {
      const PatternSolution& sol = ev.selected;
      const double oracle = evaluate_cost(table, weights, engine.terminal(), sol.pattern,
                                          sol.x_seq.front(), sol.u_seq);
      worst_cost = std::max(worst_cost,
                            std::abs(sol.cost - oracle) / std::max(1.0, std::abs(oracle)));
      for (const Eigen::VectorXd& u : sol.u_seq) {
        worst_admis = std::max(worst_admis, (u.cwiseAbs() - sys.u_bounds).maxCoeff());
      }
      worst_admis = std::max(worst_admis, sol.x_seq.back().dot(engine.terminal().P_f *
                                                               sol.x_seq.back()) -
                                              engine.terminal().epsilon);
    }
    report.checks.push_back(residual_check("selected-cost-vs-rollout", worst_cost, 1e-8));
    report.checks.push_back(residual_check("selected-solution-admissible", worst_admis, 1e-8));
  }

  {
    // Exact plant propagation over each inter-event segment.
    double worst = 0.0;
    const std::size_t max_checks = 200;
    const std::size_t stride = std::max<std::size_t>(1, trace.events.size() / max_checks);
    for (std::size_t e = 0; e + 1 < trace.events.size(); e += stride) {
      const TraceEvent& ev = trace.events[e];
      const Eigen::VectorXd x_next = reference::propagate_ode(
          sys, ev.selected.x_seq.front(), ev.selected.u_seq.front(), ev.interval);
      const Eigen::VectorXd recorded = trace.events[e + 1].selected.x_seq.front();
      worst = std::max(worst,
                       (recorded - x_next).cwiseAbs().maxCoeff() /
                           std::max(1.0, x_next.cwiseAbs().maxCoeff()));
    }
    report.checks.push_back(residual_check("plant-propagation-vs-ode-oracle", worst, 1e-8));
  }

  {
    // Trace shape: event spacing, grid spacing, hold structure.
    double worst = 0.0;
    for (std::size_t e = 1; e < trace.events.size(); ++e) {
      worst = std::max(worst, std::abs(trace.events[e].t - trace.events[e - 1].t -
                                       trace.events[e - 1].interval));
    }
    bool shape_ok = trace.transmissions == static_cast<long>(trace.events.size());
    const double resolution =
        cfg.sample_resolution > 0.0 ? cfg.sample_resolution : cfg.delta;
    for (std::size_t s = 1; s < trace.samples.size(); ++s) {
      if (std::abs(trace.samples[s].t - trace.samples[s - 1].t - resolution) > 1e-9) {
        shape_ok = false;
      }
    }
    // The held input changes only at event times.
    std::size_t e = 0;
    for (std::size_t s = 0; s + 1 < trace.samples.size(); ++s) {
      while (e + 1 < trace.events.size() &&
             trace.events[e + 1].t <= trace.samples[s].t + 1e-9) {
        ++e;
      }
      const Eigen::VectorXd& held = trace.events[e].selected.u_seq.front();
      if ((trace.samples[s].u - held).cwiseAbs().maxCoeff() > 0.0) shape_ok = false;
    }
    CheckResult check;
    check.name = "trace-well-formed";
    check.pass = shape_ok && worst <= 1e-9;
    check.measured = worst;
    check.threshold = 1e-9;
    check.detail = "event spacing i_k*delta, uniform sample grid, sample-and-hold input";
    report.checks.push_back(check);
  }

  return report;
}

}  // namespace stmpc
