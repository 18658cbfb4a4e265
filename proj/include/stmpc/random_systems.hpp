#pragma once

#include <cstdint>
#include <random>

#include "stmpc/ocp.hpp"

namespace stmpc {

/// Random plant plus weights for property tests: eigenvalues of A drawn in
/// [-2, 2] under a random orthogonal similarity, controllability enforced by
/// resampling, random SPD weights and positive input bounds.
struct RandomProblem {
  LinearSystem sys;
  CostWeights weights;
};

RandomProblem random_stabilizable_problem(std::mt19937_64& rng, int n, int m);

/// Shrinks a random direction until pattern 1 is feasible; returns the state
/// (possibly the origin-adjacent fallback after repeated halving).
Eigen::VectorXd random_feasible_state(std::mt19937_64& rng, const OCPFamily& family,
                                      double initial_radius = 4.0);

}  // namespace stmpc
