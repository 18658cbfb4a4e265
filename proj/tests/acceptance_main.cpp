// Acceptance suite: runs every acceptance criterion end to end and prints one
// pass/fail line each. Exits nonzero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <vector>

#include "stmpc/commands.hpp"
#include "stmpc/config.hpp"
#include "stmpc/random_systems.hpp"
#include "stmpc/reference.hpp"
#include "stmpc/simulator.hpp"
#include "stmpc/trace_io.hpp"
#include "stmpc/verification.hpp"

using namespace stmpc;
namespace fs = std::filesystem;

namespace {

int failures = 0;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void report(int criterion, const std::string& name, bool pass, const std::string& detail,
            double elapsed) {
  std::printf("[%s] criterion %2d (%s): %s [%.2f s]\n", pass ? "PASS" : "FAIL", criterion,
              name.c_str(), detail.c_str(), elapsed);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

const char* kSpringConfigText = R"(A = [0 1; -2 0]
B = [0; 1]
u_max = [8]
Q = [1 0; 0 1]
R = [0.5]
delta = 0.1
N_p = 80
M = 30
beta = 1
gamma = 0.5
x0 = [2.5; 0]
t_end = 40
seed = 42
)";

SimulationConfig spring_config(double beta) {
  ExperimentConfig cfg = ExperimentConfig::parse(kSpringConfigText);
  cfg.beta = beta;
  return cfg.simulation();
}

double mean_interval(const SimulationTrace& trace, double t_lo, double t_hi) {
  double sum = 0.0;
  long count = 0;
  for (const TraceEvent& ev : trace.events) {
    if (ev.t >= t_lo && ev.t < t_hi) {
      sum += ev.interval;
      ++count;
    }
  }
  return count > 0 ? sum / static_cast<double>(count) : 0.0;
}

}  // namespace

int main() {
  const LinearSystem spring = spring_config(1.0).sys;
  const CostWeights spring_w = spring_config(1.0).weights;

  // 1. Kernel against the dense trapezoid oracle.
  {
    Timer timer;
    double worst = 0.0;
    for (const double h : {0.1, 0.5, 1.0, 3.0}) {
      const Eigen::MatrixXd fast = stage_cost_kernel(spring, spring_w, h);
      const Eigen::MatrixXd oracle =
          reference::stage_cost_kernel_trapezoid(spring, spring_w, h, 1e-5);
      worst = std::max(worst, (fast - oracle).cwiseAbs().maxCoeff());
    }
    const double elapsed = timer.seconds();
    report(1, "kernel oracle", worst <= 1e-9 && elapsed < 1.0,
           "max abs diff " + fmt(worst) + " (tol 1e-9), runtime " + fmt(elapsed) + " s (< 1 s)",
           elapsed);
  }

  // 2. Discretization against adaptive 8th-order integration.
  {
    Timer timer;
    double worst = 0.0;
    for (const double h : {0.1, 0.5, 1.0, 3.0}) {
      const DiscreteMap fast = discretize(spring, h);
      const DiscreteMap oracle = reference::discretize_ode(spring, h);
      worst = std::max(worst, (fast.A - oracle.A).cwiseAbs().maxCoeff() /
                                  std::max(1.0, oracle.A.cwiseAbs().maxCoeff()));
      worst = std::max(worst, (fast.B - oracle.B).cwiseAbs().maxCoeff() /
                                  std::max(1.0, oracle.B.cwiseAbs().maxCoeff()));
    }
    report(2, "discretization oracle", worst <= 1e-8,
           "max rel diff " + fmt(worst) + " (tol 1e-8)", timer.seconds());
  }

  // 3. Terminal synthesis passes the independent verifier.
  {
    Timer timer;
    const DiscretizationTable table = DiscretizationTable::build(spring, spring_w, 0.1, 80, 30);
    const TerminalIngredients ing = synthesize_terminal(spring, spring_w, table);
    const TerminalReport rep = verify_terminal(ing, spring, spring_w, table, 1000, 42);
    const bool pass = rep.pass && rep.lyapunov_max_eigenvalue <= 1e-10 &&
                      rep.input_margin >= -1e-12 && rep.sampled_decrease_violation <= 1e-9;
    report(3, "terminal verification", pass,
           "lyapunov max eig " + fmt(rep.lyapunov_max_eigenvalue) + " (tol 1e-10), margin " +
               fmt(rep.input_margin) + ", sampled violation " +
               fmt(rep.sampled_decrease_violation) + " (slack 1e-9)",
           timer.seconds());
  }

  // 4. Brute-force equivalence on the scalar-integrator corpus.
  {
    Timer timer;
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> xdist(-1.5, 1.5);
    double worst = 0.0;
    int checked = 0;
    bool status_agree = true;
    for (const int n_p : {2, 3}) {
      const int m_p = n_p - 1;  // patterns up to 2, respecting M < N_p
      LinearSystem sys;
      sys.A = Eigen::MatrixXd::Zero(1, 1);
      sys.B = Eigen::MatrixXd::Identity(1, 1);
      sys.u_bounds = Eigen::VectorXd::Constant(1, 1.0);
      const CostWeights w{Eigen::MatrixXd::Identity(1, 1), Eigen::MatrixXd::Identity(1, 1)};
      const DiscretizationTable table = DiscretizationTable::build(sys, w, 1.0, n_p, m_p);
      const TerminalIngredients ing = synthesize_terminal(sys, w, table);
      const OCPFamily family(table, w, ing);
      for (int trial = 0; trial < 18; ++trial) {
        const Eigen::VectorXd x0 = Eigen::VectorXd::Constant(1, xdist(rng));
        for (int i = 1; i <= m_p; ++i) {
          const PatternSolution sol = family.solve(i, x0);
          const reference::GridSearchResult grid = reference::ocp_grid_search(
              table, ing, SamplingPattern::make(i, n_p, m_p), x0, 1e-3);
          if (sol.feasible() != grid.feasible) status_agree = false;
          if (sol.feasible() && grid.feasible) {
            worst = std::max(worst, std::abs(sol.cost - grid.cost));
          }
          ++checked;
        }
      }
    }
    const double elapsed = timer.seconds();
    report(4, "brute-force OCP equivalence",
           status_agree && worst <= 1e-5 && checked >= 50 && elapsed < 10.0,
           std::to_string(checked) + " instances, max cost diff " + fmt(worst) +
               " (tol 1e-5), runtime " + fmt(elapsed) + " s (< 10 s)",
           elapsed);
  }

  // Shared spring-mass runs for criteria 5-9.
  const SimulationEngine engine_b1(spring_config(1.0));
  Timer comparison_timer;
  const SimulationTrace run_b1 = engine_b1.run(SimulationMode::self_triggered);
  const SimulationTrace run_b10 =
      engine_b1.run(SimulationMode::self_triggered, TriggerParams{10.0, 0.5});
  const SimulationTrace run_periodic = engine_b1.run(SimulationMode::periodic);
  const double comparison_elapsed = comparison_timer.seconds();

  // 5. Cost-chain ordering at every event.
  {
    Timer timer;
    double worst = 0.0;
    long violations = 0;
    for (std::size_t e = 1; e < run_b1.events.size(); ++e) {
      const TraceEvent& ev = run_b1.events[e];
      for (int i = 0; i + 1 < 30; ++i) {
        if (ev.feasible[i] && ev.feasible[i + 1]) {
          const double gap = ev.costs[i] - ev.costs[i + 1];
          worst = std::max(worst, gap);
          if (gap > 1e-6) ++violations;
        }
      }
    }
    report(5, "optimal-cost chain", violations == 0,
           std::to_string(violations) + " violations, worst gap " + fmt(worst) +
               " (slack 1e-6)",
           timer.seconds());
  }

  // 6. Constructive shifted-candidate check at every event.
  {
    Timer timer;
    double worst = -1e300;
    double worst_admis = -1e300;
    long violations = 0;
    const SamplingPattern pattern1 = SamplingPattern::make(1, 80, 30);
    for (std::size_t e = 1; e < run_b1.events.size(); ++e) {
      const TraceEvent& prev = run_b1.events[e - 1];
      const TraceEvent& ev = run_b1.events[e];
      const std::vector<Eigen::VectorXd> candidate =
          shifted_candidate(prev.selected, engine_b1.terminal(), engine_b1.table());
      const Eigen::VectorXd x_now = ev.selected.x_seq.front();
      Eigen::VectorXd x = x_now;
      for (const Eigen::VectorXd& u : candidate) {
        worst_admis = std::max(worst_admis, (u.cwiseAbs() - spring.u_bounds).maxCoeff());
        x = engine_b1.table().map(1).A * x + engine_b1.table().map(1).B * u;
      }
      worst_admis = std::max(worst_admis, x.dot(engine_b1.terminal().P_f * x) -
                                              engine_b1.terminal().epsilon);
      const double cost = evaluate_cost(engine_b1.table(), spring_w, engine_b1.terminal(),
                                        pattern1, x_now, candidate);
      const double slack = cost - (prev.selected.cost - prev.applied_decrement);
      worst = std::max(worst, slack);
      if (slack > 1e-6 || worst_admis > 1e-8) ++violations;
    }
    report(6, "shifted-candidate decrease", violations == 0,
           std::to_string(violations) + " violations, worst cost slack " + fmt(worst) +
               " (tol 1e-6), worst constraint " + fmt(worst_admis) + " (tol 1e-8)",
           timer.seconds());
  }

  // 7. Scheduler availability across the study runs and random plants.
  {
    Timer timer;
    bool available = true;
    std::string detail;
    for (const SimulationTrace* trace : {&run_b1, &run_b10}) {
      for (std::size_t e = 1; e < trace->events.size(); ++e) {
        const ConditionFlags& f = trace->events[e].flags[0];
        if (!f.cost_gap_ok || !f.decrease_ok) available = false;
      }
    }
    std::mt19937_64 rng(777);
    int accepted = 0;
    int attempts = 0;
    while (accepted < 100 && attempts < 400) {
      ++attempts;
      const int n = 1 + static_cast<int>(rng() % 3);
      SimulationConfig cfg;
      try {
        const RandomProblem problem = random_stabilizable_problem(rng, n, 1);
        cfg.sys = problem.sys;
        cfg.weights = problem.weights;
        cfg.trigger = TriggerParams{0.5, 0.5};
        cfg.delta = 0.1;
        cfg.n_intervals = 16;
        cfg.n_patterns = 4;
        cfg.t_end = 3.0;
        cfg.x0 = Eigen::VectorXd::Zero(n);
        const SimulationEngine probe(cfg);
        cfg.x0 = random_feasible_state(rng, probe.family(), 3.0);
        const SimulationEngine engine(cfg);
        const SimulationTrace trace = engine.run(SimulationMode::self_triggered);
        for (std::size_t e = 1; e < trace.events.size(); ++e) {
          const ConditionFlags& f = trace.events[e].flags[0];
          if (!f.cost_gap_ok || !f.decrease_ok) available = false;
        }
        ++accepted;
      } catch (const SynthesisFailureError&) {
        continue;  // unstabilizable draw, resample
      } catch (const NumericalFailureError&) {
        continue;  // Riccati budget hit on a near-marginal mode, resample
      } catch (const Error& err) {
        available = false;
        detail = err.what();
        break;
      }
    }
    report(7, "pattern-1 availability", available && accepted >= 100,
           detail.empty() ? "no contract violation across 2 study runs and " +
                                std::to_string(accepted) + " random systems"
                          : detail,
           timer.seconds());
  }

  // 8. Non-increasing selected cost and convergence of the study run.
  {
    Timer timer;
    double worst_increase = 0.0;
    for (std::size_t e = 1; e < run_b1.events.size(); ++e) {
      worst_increase = std::max(
          worst_increase, run_b1.events[e].selected.cost - run_b1.events[e - 1].selected.cost);
    }
    double worst_norm = 0.0;
    for (const TraceSample& s : run_b1.samples) {
      if (s.t >= 35.0) worst_norm = std::max(worst_norm, s.x.norm());
    }
    report(8, "cost decrease and convergence", worst_increase <= 1e-6 && worst_norm <= 0.05,
           "worst cost increase " + fmt(worst_increase) + " (tol 1e-6), max |x(t)| for t>=35 " +
               fmt(worst_norm) + " (<= 0.05)",
           timer.seconds());
  }

  // 9. Trade-off reproduction.
  {
    Timer timer;
    const bool counts = run_b10.transmissions < run_b1.transmissions &&
                        run_b1.transmissions < run_periodic.transmissions &&
                        run_periodic.transmissions == 400;
    const bool costs =
        run_periodic.cumulative_stage_cost <= run_b1.cumulative_stage_cost + 1e-9 &&
        run_b1.cumulative_stage_cost <= run_b10.cumulative_stage_cost + 1e-9;
    const double early = mean_interval(run_b10, 0.0, 20.0);
    const double late = mean_interval(run_b10, 20.0, 40.0);
    const bool growth = late >= early;
    const bool budget = comparison_elapsed < 300.0;
    std::ostringstream detail;
    detail << "transmissions " << run_b10.transmissions << " (b=10) vs "
           << run_b1.transmissions << " (b=1) vs " << run_periodic.transmissions
           << " (periodic); costs " << fmt(run_periodic.cumulative_stage_cost) << " <= "
           << fmt(run_b1.cumulative_stage_cost) << " <= "
           << fmt(run_b10.cumulative_stage_cost) << "; b=10 mean interval [20,40) " << fmt(late)
           << " >= [0,20) " << fmt(early) << "; comparison runtime "
           << fmt(comparison_elapsed) << " s (< 300 s)";
    report(9, "trade-off reproduction", counts && costs && growth && budget, detail.str(),
           timer.seconds());
  }

  // 10. Byte-identical repeated simulation through the CLI command path.
  {
    Timer timer;
    const fs::path dir =
        fs::temp_directory_path() / ("stmpc_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const fs::path cfg_path = dir / "spring.cfg";
    {
      std::ofstream out(cfg_path);
      out << kSpringConfigText;
    }
    CommandArgs args;
    args.config_path = cfg_path.string();
    args.out_path = (dir / "a.csv").string();
    const int rc1 = cmd_simulate(args, "self-triggered");
    args.out_path = (dir / "b.csv").string();
    const int rc2 = cmd_simulate(args, "self-triggered");
    const auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      std::ostringstream buf;
      buf << in.rdbuf();
      return buf.str();
    };
    const std::string a = slurp(dir / "a.csv");
    const std::string b = slurp(dir / "b.csv");
    const bool pass = rc1 == 0 && rc2 == 0 && !a.empty() && a == b;
    fs::remove_all(dir);
    report(10, "determinism", pass,
           pass ? "repeated runs produced byte-identical CSV (" +
                      std::to_string(a.size()) + " bytes)"
                : "outputs differ or a run failed",
           timer.seconds());
  }

  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
