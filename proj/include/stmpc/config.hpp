#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <string_view>

#include "stmpc/simulator.hpp"

namespace stmpc {

/// Flat key/value experiment description with matrix literals, e.g.
///
///   A = [0 1; -2 0]
///   B = [0; 1]
///   u_max = [8]
///   Q = [1 0; 0 1]
///   R = [0.5]
///   delta = 0.1
///   N_p = 80
///   M = 30
///   beta = 1
///   gamma = 0.5
///   x0 = [2.5; 0]
///   t_end = 40
///
/// Rows are ';'-separated, entries by whitespace or commas; '#' starts a
/// comment. Unknown, duplicate, or missing required keys are rejected, as are
/// ragged matrix rows. `sample_resolution` and `seed` are optional.
struct ExperimentConfig {
  Eigen::MatrixXd A, B;
  Eigen::VectorXd u_max;
  Eigen::MatrixXd Q, R;
  double delta = 0.0;
  int n_intervals = 0;  ///< key N_p
  int n_patterns = 0;   ///< key M
  double beta = 0.0;
  double gamma = 0.0;
  Eigen::VectorXd x0;
  double t_end = 0.0;
  double sample_resolution = 0.0;  ///< 0 means delta
  std::uint64_t seed = 0;

  static ExperimentConfig parse(std::string_view text);
  static ExperimentConfig parse_file(const std::string& path);

  /// Canonical serialization; parse(serialize()) reproduces the value exactly.
  std::string serialize() const;

  bool operator==(const ExperimentConfig&) const = default;

  LinearSystem system() const;
  CostWeights weights() const;
  TriggerParams trigger() const;
  /// Full simulation configuration; validates all cross-field invariants.
  SimulationConfig simulation() const;
};

/// Terminal-ingredients persistence in the same key/value format
/// (keys delta, K, P_f, epsilon).
std::string serialize_terminal(const TerminalIngredients& ing);
TerminalIngredients parse_terminal(std::string_view text);
TerminalIngredients parse_terminal_file(const std::string& path);

}  // namespace stmpc
