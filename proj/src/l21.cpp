#include "hiht/l21.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "hiht/error.hpp"
#include "hiht/thresholding.hpp"

namespace hiht {

WeightMatrix row_soft_threshold(const Matrix& step, double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau))
    throw Error(ErrorKind::Parameter, "tau must be a finite number >= 0, got " + std::to_string(tau));
  WeightMatrix out = step;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm <= tau)
      out.row(i).setZero();
    else
      out.row(i) *= 1.0 - tau / norm;
  }
  return out;
}

double l21_norm(const WeightMatrix& weights) { return weights.rowwise().norm().sum(); }

double l21_objective(const WeightMatrix& weights, double lambda, const CenteredData& data) {
  if (!(lambda >= 0.0)) throw Error(ErrorKind::Parameter, "lambda must be >= 0");
  return loss(weights, data) + lambda * l21_norm(weights);
}

L21Result l21_solve(const CenteredData& data, double lambda, const SolverConfig& config) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw Error(ErrorKind::Parameter, "lambda must be a finite number >= 0");
  const auto start = std::chrono::steady_clock::now();
  SolverConfig cfg = config;
  if (!cfg.lambda0) cfg.lambda0 = 1.0;  // unused here; avoids computing the l2,0 start
  cfg = resolve_config(cfg, data);
  const double max_l = *cfg.max_lipschitz;

  L21Result result;
  result.weights = WeightMatrix::Zero(data.feature_count(), data.class_count());
  result.final_lipschitz = *cfg.lipschitz0;
  result.trace.push_back(l21_objective(result.weights, lambda, data));

  for (;;) {
    const WeightMatrix& w = result.weights;
    const Matrix r = w.transpose() * data.x_centered - data.y_centered;
    const Matrix grad = data.x_centered * r.transpose();
    const double penalty = l21_norm(w);
    double lipschitz = result.final_lipschitz;
    WeightMatrix next;
    Matrix delta_x;
    double step_sq = 0.0;
    for (;;) {
      next = row_soft_threshold(gradient_step(w, grad, lipschitz), lambda / lipschitz);
      ++result.updates;
      const Matrix delta = next - w;
      delta_x = delta.transpose() * data.x_centered;
      step_sq = delta.squaredNorm();
      const double inner = (grad.array() * delta.array()).sum();
      const double curvature = 0.5 * delta_x.squaredNorm();
      const double next_penalty = l21_norm(next);
      const double decrease = -inner - curvature + lambda * (penalty - next_penalty);
      // Near lambda_max the terms cancel almost exactly; rounding noise alone must not inflate L.
      const double noise = 16.0 * std::numeric_limits<double>::epsilon() *
                           (std::abs(inner) + curvature + lambda * (penalty + next_penalty));
      if (!(decrease + noise < 0.5 * cfg.eta * step_sq)) break;
      lipschitz *= cfg.gamma;
      if (lipschitz > max_l) {
        std::ostringstream msg;
        msg << "l2,1 line search exceeded max_L at lambda=" << lambda << ", L=" << lipschitz;
        throw Error(ErrorKind::Divergence, msg.str());
      }
    }
    result.trace.push_back(0.5 * (r + delta_x).squaredNorm() + lambda * l21_norm(next));
    result.weights = std::move(next);
    result.final_lipschitz = lipschitz;
    ++result.iterations;
    if (step_sq <= cfg.epsilon) break;
    if (result.iterations >= cfg.max_inner_iterations) {
      result.truncated = true;
      break;
    }
  }
  result.objective = l21_objective(result.weights, lambda, data);
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

double l21_lambda_max(const CenteredData& data) {
  const WeightMatrix zero = WeightMatrix::Zero(data.feature_count(), data.class_count());
  return row_norms(gradient(zero, data)).maxCoeff();
}

MatchedL21 l21_match_loss(const CenteredData& data, double target_loss, const SolverConfig& config,
                          int bisection_steps) {
  const double hi_lambda = l21_lambda_max(data);
  if (!(hi_lambda > 0.0)) return {0.0, l21_solve(data, 0.0, config)};
  double lo = std::log(hi_lambda * 1e-8);
  double hi = std::log(hi_lambda);
  MatchedL21 best{hi_lambda, l21_solve(data, hi_lambda, config)};
  double best_gap = std::abs(loss(best.fit.weights, data) - target_loss);
  for (int step = 0; step < bisection_steps; ++step) {
    const double mid = 0.5 * (lo + hi);
    const double lambda = std::exp(mid);
    L21Result fit = l21_solve(data, lambda, config);
    const double fit_loss = loss(fit.weights, data);
    const double gap = std::abs(fit_loss - target_loss);
    if (gap < best_gap) {
      best_gap = gap;
      best = {lambda, std::move(fit)};
    }
    if (fit_loss > target_loss)
      hi = mid;
    else
      lo = mid;
  }
  return best;
}

}  // namespace hiht
