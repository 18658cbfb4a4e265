#include "stmpc/trace_io.hpp"

#include <charconv>
#include <iomanip>
#include <ostream>

namespace stmpc {

std::string format_sci(double value) {
  char buf[48];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::scientific, 11);
  return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, const SimulationTrace& trace, int state_dim,
                     int input_dim, int n_patterns) {
  out << "# samples\n";
  out << "t";
  for (int i = 1; i <= state_dim; ++i) out << ",x" << i;
  for (int j = 1; j <= input_dim; ++j) out << ",u" << j;
  out << "\n";
  for (const TraceSample& sample : trace.samples) {
    out << format_sci(sample.t);
    for (int i = 0; i < state_dim; ++i) out << "," << format_sci(sample.x[i]);
    for (int j = 0; j < input_dim; ++j) out << "," << format_sci(sample.u[j]);
    out << "\n";
  }

  out << "# events\n";
  out << "k,t_k,i_k,interval";
  for (int i = 1; i <= n_patterns; ++i) out << ",J_" << i;
  for (int i = 1; i <= n_patterns; ++i) out << ",cond_a_" << i;
  for (int i = 1; i <= n_patterns; ++i) out << ",cond_b_" << i;
  out << "\n";
  for (const TraceEvent& event : trace.events) {
    out << event.k << "," << format_sci(event.t) << "," << event.pattern << ","
        << format_sci(event.interval);
    for (int i = 0; i < n_patterns; ++i) {
      out << ",";
      if (event.solved[i] && event.feasible[i]) out << format_sci(event.costs[i]);
    }
    for (int i = 0; i < n_patterns; ++i) {
      out << ",";
      if (event.solved[i]) out << (event.flags[i].cost_gap_ok ? "1" : "0");
    }
    for (int i = 0; i < n_patterns; ++i) {
      out << ",";
      if (event.solved[i]) out << (event.flags[i].decrease_ok ? "1" : "0");
    }
    out << "\n";
  }

  out << "# summary\n";
  out << "transmissions,cumulative_stage_cost\n";
  out << trace.transmissions << "," << format_sci(trace.cumulative_stage_cost) << "\n";
}

double settling_time(const SimulationTrace& trace, double threshold) {
  double settled_from = -1.0;
  for (auto it = trace.samples.rbegin(); it != trace.samples.rend(); ++it) {
    if (it->x.norm() < threshold) {
      settled_from = it->t;
    } else {
      break;
    }
  }
  return settled_from;
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "mode,beta,transmissions,cumulative_stage_cost,settling_time\n";
  for (const ComparisonRow& row : rows) {
    out << row.mode << ",";
    if (row.mode != "periodic") out << format_sci(row.beta);
    out << "," << row.transmissions << "," << format_sci(row.cumulative_stage_cost) << ",";
    if (row.settling_time >= 0.0) out << format_sci(row.settling_time);
    out << "\n";
  }
}

void write_comparison_text(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << std::left << std::setw(16) << "mode" << std::setw(12) << "beta" << std::setw(15)
      << "transmissions" << std::setw(22) << "cumulative cost" << "settling time\n";
  for (const ComparisonRow& row : rows) {
    out << std::left << std::setw(16) << row.mode << std::setw(12);
    if (row.mode == "periodic") {
      out << "-";
    } else {
      out << row.beta;
    }
    out << std::setw(15) << row.transmissions << std::setw(22) << row.cumulative_stage_cost;
    if (row.settling_time >= 0.0) {
      out << row.settling_time;
    } else {
      out << "-";
    }
    out << "\n";
  }
}

}  // namespace stmpc
