#pragma once

#include "hiht/solver.hpp"

namespace hiht {

// Group soft threshold: row i -> max(0, 1 - tau / ||g_i||) g_i.
WeightMatrix row_soft_threshold(const Matrix& step, double tau);

// ||W||_{2,1}, the sum of row norms.
double l21_norm(const WeightMatrix& weights);

// 1/2 ||WᵀX̃ - Ỹ||_F^2 + lambda ||W||_{2,1}
double l21_objective(const WeightMatrix& weights, double lambda, const CenteredData& data);

struct L21Result {
  WeightMatrix weights;
  double objective = 0.0;
  double final_lipschitz = 0.0;
  int iterations = 0;
  int updates = 0;
  bool truncated = false;
  double wall_seconds = 0.0;
  std::vector<double> trace;  // objective at W0 = 0, then per accepted step
};

/**
 * Proximal gradient for the l2,1-regularised least-squares problem, started
 * from W = 0 and using the same backtracking rule, stopping tolerance and
 * iteration cap as the l2,0 solver (config fields L0, gamma, eta, epsilon,
 * max_inner_iterations, max_L; unset fields are resolved from the data).
 */
L21Result l21_solve(const CenteredData& data, double lambda, const SolverConfig& config);

// Smallest lambda at which W = 0 is optimal: the largest row norm of grad f(0).
double l21_lambda_max(const CenteredData& data);

struct MatchedL21 {
  double lambda = 0.0;
  L21Result fit;
};

// Bisection on log(lambda) for the l2,1 solution whose loss is closest to
// target_loss (the loss of that solution grows with lambda).
MatchedL21 l21_match_loss(const CenteredData& data, double target_loss, const SolverConfig& config,
                          int bisection_steps = 40);

}  // namespace hiht
