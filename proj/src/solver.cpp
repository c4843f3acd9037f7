#include "hiht/solver.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "hiht/error.hpp"
#include "hiht/thresholding.hpp"

namespace hiht {

namespace {

void require(bool ok, const std::string& message) {
  if (!ok) throw Error(ErrorKind::Config, message);
}

struct Residual {
  Matrix values;  // Wᵀ X̃ - Ỹ, C x N
};

Residual residual_of(const WeightMatrix& weights, const CenteredData& data) {
  return {weights.transpose() * data.x_centered - data.y_centered};
}

}  // namespace

void SolverConfig::validate() const {
  require(rho > 0.0 && rho < 1.0, "rho must lie in (0, 1)");
  require(gamma > 1.0 && std::isfinite(gamma), "gamma must be > 1");
  require(eta > 0.0 && std::isfinite(eta), "eta must be > 0");
  require(epsilon > 0.0 && std::isfinite(epsilon), "epsilon must be > 0");
  require(path_steps >= 1, "path_steps must be >= 1");
  require(max_inner_iterations >= 1, "max_inner_iterations must be >= 1");
  if (lambda0) require(*lambda0 > 0.0 && std::isfinite(*lambda0), "lambda0 must be > 0");
  if (lipschitz0) require(*lipschitz0 > 0.0 && std::isfinite(*lipschitz0), "L0 must be > 0");
  if (max_lipschitz) require(*max_lipschitz > 0.0, "max_L must be > 0");
  if (lipschitz0 && max_lipschitz) require(*max_lipschitz >= *lipschitz0, "max_L must be >= L0");
}

SolverConfig resolve_config(const SolverConfig& config, const CenteredData& data) {
  config.validate();
  SolverConfig out = config;
  if (!out.lipschitz0) {
    SpectralOptions options;
    options.seed = config.seed;
    out.lipschitz0 = 0.1 * spectral_bound(data, options);
  }
  if (!out.lambda0) {
    const double l0 = *out.lipschitz0;
    const WeightMatrix zero = WeightMatrix::Zero(data.feature_count(), data.class_count());
    const Matrix step = gradient_step(zero, gradient(zero, data), l0);
    const double max_sq = step.rowwise().squaredNorm().maxCoeff();
    if (max_sq > 0.0) {
      // lambda0 = max ||grad_i||^2 / (2 L0), nudged up until the threshold
      // comparison zeroes every row in floating point as well.
      double lambda0 = 0.5 * max_sq * l0;
      while (max_sq > 2.0 * lambda0 / l0) lambda0 = std::nextafter(lambda0, INFINITY);
      out.lambda0 = lambda0;
    } else {
      out.lambda0 = 1.0;  // nothing to select; any positive start works
    }
  }
  if (!out.max_lipschitz) out.max_lipschitz = 1e12 * *out.lipschitz0;
  out.validate();
  return out;
}

LineSearchResult line_search_update(const WeightMatrix& weights, double lambda, double lipschitz,
                                    const SolverConfig& config, const CenteredData& data) {
  check_weight_shape(weights, data);
  if (!(lipschitz > 0.0)) throw Error(ErrorKind::Parameter, "L must be > 0");
  const double max_l = config.max_lipschitz.value_or(1e12 * lipschitz);

  const Residual r = residual_of(weights, data);
  const Matrix grad = data.x_centered * r.values.transpose();
  const double current = 0.5 * r.values.squaredNorm() + lambda * static_cast<double>(support_size(weights));
  const auto current_support = static_cast<double>(support_size(weights));

  LineSearchResult result;
  result.lipschitz = lipschitz;
  for (;;) {
    result.weights = iht_update(weights, grad, lambda, result.lipschitz);
    ++result.updates;
    const Matrix delta = result.weights - weights;
    const Matrix delta_x = delta.transpose() * data.x_centered;  // C x N
    const double step_sq = delta.squaredNorm();
    const double decrease = -(grad.array() * delta.array()).sum() - 0.5 * delta_x.squaredNorm() +
                            lambda * (current_support - static_cast<double>(support_size(result.weights)));
    if (!(decrease < 0.5 * config.eta * step_sq)) {
      result.step_sq = step_sq;
      result.objective = 0.5 * (r.values + delta_x).squaredNorm() +
                         lambda * static_cast<double>(support_size(result.weights));
      return result;
    }
    result.lipschitz *= config.gamma;
    if (result.lipschitz > max_l) {
      std::ostringstream msg;
      msg << "line search exceeded max_L at lambda=" << lambda << ", L=" << result.lipschitz
          << ", objective=" << current;
      throw Error(ErrorKind::Divergence, msg.str());
    }
  }
}

const char* to_string(Algorithm algorithm) {
  return algorithm == Algorithm::Hiht ? "hiht" : "ahiht";
}

std::vector<double> lambda_sequence(const SolverConfig& config) {
  if (!config.lambda0) throw Error(ErrorKind::Config, "lambda0 is unresolved");
  std::vector<double> lambdas;
  lambdas.reserve(static_cast<std::size_t>(config.path_steps));
  double lambda = *config.lambda0;
  for (int k = 0; k < config.path_steps; ++k) {
    lambdas.push_back(lambda);
    lambda *= config.rho;
  }
  return lambdas;
}

RegularizationPath solve_path(Algorithm algorithm, const CenteredData& data, const SolverConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RegularizationPath path;
  path.algorithm = algorithm;
  path.config = resolve_config(config, data);
  const SolverConfig& cfg = path.config;
  const int inner_cap = algorithm == Algorithm::Ahiht ? 1 : cfg.max_inner_iterations;

  WeightMatrix weights = WeightMatrix::Zero(data.feature_count(), data.class_count());
  double lipschitz = *cfg.lipschitz0;
  for (const double lambda : lambda_sequence(cfg)) {
    PathPoint point;
    point.lambda = lambda;
    point.trace.push_back(objective_value(weights, lambda, data));
    for (;;) {
      LineSearchResult step = line_search_update(weights, lambda, lipschitz, cfg, data);
      weights = std::move(step.weights);
      lipschitz = step.lipschitz;
      ++point.inner_iterations;
      point.iht_updates += step.updates;
      point.trace.push_back(step.objective);
      if (algorithm == Algorithm::Ahiht || step.step_sq <= cfg.epsilon) break;
      if (point.inner_iterations >= inner_cap) {
        point.truncated = true;
        break;
      }
    }
    point.weights = weights;
    point.bias = data.y_mean - weights.transpose() * data.x_mean;
    point.objective = objective_value(weights, lambda, data);
    point.support = support(weights);
    point.support_size = point.support.size();
    point.final_lipschitz = lipschitz;
    path.total_iht_updates += point.iht_updates;
    path.points.push_back(std::move(point));
  }
  path.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return path;
}

RegularizationPath hiht_solve(const CenteredData& data, const SolverConfig& config) {
  return solve_path(Algorithm::Hiht, data, config);
}

RegularizationPath ahiht_solve(const CenteredData& data, const SolverConfig& config) {
  return solve_path(Algorithm::Ahiht, data, config);
}

const PathPoint& select_by_count(const RegularizationPath& path, std::size_t target) {
  if (path.points.empty()) throw Error(ErrorKind::Parameter, "cannot select from an empty path");
  const PathPoint* best = &path.points.front();
  auto distance = [target](const PathPoint& p) {
    return p.support_size > target ? p.support_size - target : target - p.support_size;
  };
  for (const PathPoint& p : path.points) {
    const std::size_t dp = distance(p);
    const std::size_t db = distance(*best);
    if (dp < db || (dp == db && p.support_size < best->support_size) ||
        (dp == db && p.support_size == best->support_size && p.lambda > best->lambda))
      best = &p;
  }
  return *best;
}

}  // namespace hiht
