#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hiht/objective.hpp"

namespace hiht {

struct SolverConfig {
  std::optional<double> lambda0;        // auto: smallest lambda that keeps the first step at W = 0
  double rho = 0.7;                     // lambda decay per homotopy step, in (0, 1)
  double gamma = 2.0;                   // L inflation factor, > 1
  double eta = 1e-4;                    // sufficient-decrease coefficient, > 0
  double epsilon = 1e-6;                // inner stop on ||W_i - W_{i+1}||_F^2
  std::optional<double> lipschitz0;     // auto: 0.1 * spectral_bound
  int path_steps = 30;
  int max_inner_iterations = 1000;
  std::optional<double> max_lipschitz;  // auto: 1e12 * lipschitz0
  std::uint64_t seed = 0;               // power-iteration start vector

  // Throws Config on any violated range constraint (unset optionals are fine).
  void validate() const;
  bool resolved() const { return lambda0 && lipschitz0 && max_lipschitz; }
};

// Fills every unset field from the data; set fields pass through unchanged.
SolverConfig resolve_config(const SolverConfig& config, const CenteredData& data);

struct LineSearchResult {
  WeightMatrix weights;
  double lipschitz = 0.0;
  double objective = 0.0;  // objective at the accepted weights
  double step_sq = 0.0;    // ||W - W+||_F^2
  int updates = 0;         // IHT updates evaluated, including rejected ones
};

/**
 * L-tuning iteration: apply an IHT update and inflate L by gamma until
 *
 *   phi(W) - phi(W+) >= (eta / 2) ||W - W+||_F^2.
 *
 * The decrease is evaluated as -<grad f(W), D> - 1/2 ||Dᵀ X̃||^2 plus the
 * support-size change, D = W+ - W, which equals the difference of the two
 * objective values without cancellation near convergence.
 *
 * Throws Divergence once L passes the configured max_lipschitz.
 */
LineSearchResult line_search_update(const WeightMatrix& weights, double lambda, double lipschitz,
                                    const SolverConfig& config, const CenteredData& data);

struct PathPoint {
  double lambda = 0.0;
  WeightMatrix weights;
  BiasVector bias;
  double objective = 0.0;
  std::vector<std::size_t> support;
  std::size_t support_size = 0;
  int inner_iterations = 0;  // accepted updates at this lambda
  int iht_updates = 0;       // all updates, including line-search retries
  double final_lipschitz = 0.0;
  bool truncated = false;    // inner iteration cap reached
  // Objective under this lambda: trace[0] at the warm start, then one entry per accepted update.
  std::vector<double> trace;
};

enum class Algorithm { Hiht, Ahiht };

const char* to_string(Algorithm algorithm);

struct RegularizationPath {
  Algorithm algorithm = Algorithm::Hiht;
  SolverConfig config;  // resolved
  std::vector<PathPoint> points;  // strictly decreasing lambda
  long total_iht_updates = 0;
  double wall_seconds = 0.0;
};

// lambda0 * rho^k for k < path_steps, accumulated by repeated multiplication.
std::vector<double> lambda_sequence(const SolverConfig& config);

RegularizationPath hiht_solve(const CenteredData& data, const SolverConfig& config);
RegularizationPath ahiht_solve(const CenteredData& data, const SolverConfig& config);
RegularizationPath solve_path(Algorithm algorithm, const CenteredData& data, const SolverConfig& config);

// Point whose support size is nearest to target; ties prefer the smaller
// support, then the larger lambda.
const PathPoint& select_by_count(const RegularizationPath& path, std::size_t target);

}  // namespace hiht
