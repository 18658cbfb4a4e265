#include "stmpc/simulator.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace stmpc {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

void SimulationConfig::validate() const {
  sys.validate();
  weights.validate(sys.state_dim(), sys.input_dim());
  trigger.validate();
  if (!(delta > 0.0)) {
    throw InvalidInputError("SimulationConfig: delta must be positive");
  }
  if (n_patterns < 1 || n_patterns >= n_intervals) {
    throw InvalidInputError("SimulationConfig: need 1 <= M < N_p");
  }
  if (x0.size() != sys.state_dim() || !x0.allFinite()) {
    throw InvalidInputError("SimulationConfig: x0 must be a finite n-vector");
  }
  if (!(t_end > 0.0)) {
    throw InvalidInputError("SimulationConfig: t_end must be positive");
  }
  if (sample_resolution != 0.0) {
    if (!(sample_resolution > 0.0) || sample_resolution > delta * (1.0 + 1e-12)) {
      throw InvalidInputError("SimulationConfig: sample_resolution must lie in (0, delta]");
    }
    const double ratio = delta / sample_resolution;
    if (std::abs(ratio - std::round(ratio)) > 1e-9) {
      throw InvalidInputError(
          "SimulationConfig: delta must be an integer multiple of sample_resolution");
    }
  }
  if (terminal.has_value()) {
    terminal->validate(sys.state_dim(), sys.input_dim());
  }
}

SimulationEngine::SimulationEngine(const SimulationConfig& config, Execution exec)
    : config_(config), exec_(exec) {
  config_.validate();
  table_ = std::make_shared<DiscretizationTable>(DiscretizationTable::build(
      config_.sys, config_.weights, config_.delta, config_.n_intervals, config_.n_patterns,
      exec));
  terminal_ = config_.terminal.has_value()
                  ? *config_.terminal
                  : synthesize_terminal(config_.sys, config_.weights, *table_);
  family_ = std::make_shared<OCPFamily>(*table_, config_.weights, terminal_);

  const double resolution =
      config_.sample_resolution > 0.0 ? config_.sample_resolution : config_.delta;
  substeps_per_delta_ = std::lround(config_.delta / resolution);
  const long total = substeps_per_delta_ * config_.n_patterns;
  grid_maps_.resize(static_cast<std::size_t>(total));
  for (long j = 1; j <= total; ++j) {
    if (substeps_per_delta_ == 1) {
      grid_maps_[j - 1] = table_->map(static_cast<int>(j));
    } else {
      grid_maps_[j - 1] = discretize(config_.sys, static_cast<double>(j) * resolution);
    }
  }
}

SimulationTrace SimulationEngine::run(SimulationMode mode) const {
  return run(mode, config_.trigger);
}

SimulationTrace SimulationEngine::run(SimulationMode mode, const TriggerParams& trigger) const {
  const int M = config_.n_patterns;
  const long q = substeps_per_delta_;
  const double resolution = config_.delta / static_cast<double>(q);
  const double time_tol = 1e-9 * config_.delta;

  SimulationTrace trace;
  trace.t_end = config_.t_end;

  Eigen::VectorXd x = config_.x0;
  long delta_steps = 0;  // elapsed time in units of delta
  long k = 0;

  // Records the hold [t_k, t_k + pattern * delta): grid samples, the exact
  // stage-cost contribution clipped at t_end, and the state update.
  const auto apply_hold = [&](int pattern, const Eigen::VectorXd& u) {
    const double t_start = static_cast<double>(delta_steps) * config_.delta;
    for (long j = 0; j < pattern * q; ++j) {
      TraceSample sample;
      sample.t = t_start + static_cast<double>(j) * resolution;
      sample.x = j == 0 ? x : Eigen::VectorXd(grid_maps_[j - 1].A * x + grid_maps_[j - 1].B * u);
      sample.u = u;
      trace.samples.push_back(std::move(sample));
    }
    const double hold = pattern * config_.delta;
    if (t_start + hold <= config_.t_end + time_tol) {
      trace.cumulative_stage_cost += stage_cost(x, u, table_->kernel(pattern));
    } else {
      const double partial = config_.t_end - t_start;
      if (partial > time_tol) {
        trace.cumulative_stage_cost +=
            stage_cost(x, u, stage_cost_kernel(config_.sys, config_.weights, partial));
      }
    }
    const DiscreteMap& map = table_->map(pattern);
    x = map.A * x + map.B * u;
    delta_steps += pattern;
    ++k;
  };

  // Step (i): solve pattern 1 only, transmit it, hold for delta.
  const PatternSolution first = family_->solve(1, x);
  const TriggerInit init = initialize_trigger(first, *table_);
  TriggerState state = init.state;
  {
    TraceEvent event;
    event.k = 0;
    event.t = 0.0;
    event.pattern = 1;
    event.interval = config_.delta;
    event.costs.assign(M, kInf);
    event.costs[0] = first.cost;
    event.solved.assign(M, false);
    event.solved[0] = true;
    event.feasible.assign(M, false);
    event.feasible[0] = first.feasible();
    event.flags.resize(M);
    event.flags[0] = ConditionFlags{true, true};
    event.selected = first;
    event.applied_decrement = state.prev_decrement;
    trace.events.push_back(std::move(event));
  }
  apply_hold(1, first.u_seq.front());

  while (static_cast<double>(delta_steps) * config_.delta < config_.t_end - time_tol) {
    TraceEvent event;
    event.k = k;
    event.t = static_cast<double>(delta_steps) * config_.delta;
    event.costs.assign(M, kInf);
    event.solved.assign(M, false);
    event.feasible.assign(M, false);
    event.flags.resize(M);

    if (mode == SimulationMode::periodic) {
      std::vector<PatternSolution> solutions(1);
      solutions[0] = family_->solve(1, x);
      if (!solutions[0].feasible()) {
        throw ContractViolationError("simulate_periodic: pattern 1 infeasible at event " +
                                     std::to_string(k) + " (t = " + std::to_string(event.t) +
                                     ")");
      }
      event.flags[0] = check_conditions(1, solutions, state, trigger);
      event.pattern = 1;
      event.costs[0] = solutions[0].cost;
      event.solved[0] = true;
      event.feasible[0] = true;
      event.selected = solutions[0];
      state.step = k;
      state.prev_pattern = 1;
      state.prev_cost = solutions[0].cost;
      state.prev_decrement =
          stage_cost(x, solutions[0].u_seq.front(), table_->kernel(1));
    } else {
      std::vector<PatternSolution> solutions = family_->solve_all(x, exec_);
      SelectResult sel;
      try {
        sel = select_pattern(solutions, state, trigger, *table_);
      } catch (const ContractViolationError& err) {
        throw ContractViolationError(std::string(err.what()) + " [event " + std::to_string(k) +
                                     ", t = " + std::to_string(event.t) + "]");
      }
      for (int i = 0; i < M; ++i) {
        event.costs[i] = solutions[i].cost;
        event.solved[i] = true;
        event.feasible[i] = solutions[i].feasible();
      }
      event.flags = sel.flags;
      event.pattern = sel.pattern;
      event.selected = solutions[sel.pattern - 1];
      state = sel.next_state;
      state.step = k;
    }

    event.interval = event.pattern * config_.delta;
    event.applied_decrement = state.prev_decrement;
    const Eigen::VectorXd u = event.selected.u_seq.front();
    const int pattern = event.pattern;
    trace.events.push_back(std::move(event));
    apply_hold(pattern, u);
  }

  TraceSample final_sample;
  final_sample.t = static_cast<double>(delta_steps) * config_.delta;
  final_sample.x = x;
  final_sample.u = trace.events.back().selected.u_seq.front();
  trace.samples.push_back(std::move(final_sample));

  trace.transmissions = static_cast<long>(trace.events.size());
  return trace;
}

SimulationTrace simulate(const SimulationConfig& config) {
  return SimulationEngine(config).run(SimulationMode::self_triggered);
}

SimulationTrace simulate_periodic(const SimulationConfig& config) {
  return SimulationEngine(config).run(SimulationMode::periodic);
}

}  // namespace stmpc
