#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "stmpc/simulator.hpp"

namespace stmpc {

/// 12-significant-digit scientific formatting, locale-independent.
std::string format_sci(double value);

/// Writes the trace as two CSV tables plus a summary footer:
///
///   # samples
///   t,x1..xn,u1..um
///   # events
///   k,t_k,i_k,interval,J_1..J_M,cond_a_1..cond_a_M,cond_b_1..cond_b_M
///   # summary
///   transmissions,cumulative_stage_cost
///
/// Cost cells are empty for infeasible or unsolved patterns, condition cells
/// empty for unsolved ones. All numeric cells use format_sci.
void write_trace_csv(std::ostream& out, const SimulationTrace& trace, int state_dim,
                     int input_dim, int n_patterns);

/// One row of the trade-off comparison.
struct ComparisonRow {
  std::string mode;  ///< "periodic" or "self-triggered"
  double beta = 0.0; ///< meaningful for self-triggered rows only
  long transmissions = 0;
  double cumulative_stage_cost = 0.0;
  double settling_time = -1.0;  ///< first time with |x| < threshold through the end; -1 if never
};

/// First sample time from which the state norm stays below `threshold`
/// through the end of the trace, or -1 when it never settles.
double settling_time(const SimulationTrace& trace, double threshold);

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);
void write_comparison_text(std::ostream& out, const std::vector<ComparisonRow>& rows);

}  // namespace stmpc
