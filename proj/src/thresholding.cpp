#include "hiht/thresholding.hpp"

#include <cmath>
#include <string>

#include "hiht/error.hpp"

namespace hiht {

namespace {

void check_lipschitz(double lipschitz) {
  if (!(lipschitz > 0.0) || !std::isfinite(lipschitz))
    throw Error(ErrorKind::Parameter, "L must be a positive finite number, got " + std::to_string(lipschitz));
}

}  // namespace

Matrix gradient_step(const WeightMatrix& weights, const Matrix& grad, double lipschitz) {
  check_lipschitz(lipschitz);
  if (weights.rows() != grad.rows() || weights.cols() != grad.cols())
    throw Error(ErrorKind::Shape, "weights and gradient shapes differ");
  return weights - grad / lipschitz;
}

WeightMatrix row_hard_threshold(const Matrix& step, double lambda, double lipschitz) {
  check_lipschitz(lipschitz);
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw Error(ErrorKind::Parameter, "lambda must be a finite number >= 0, got " + std::to_string(lambda));
  if (!step.allFinite())
    throw Error(ErrorKind::Divergence, "non-finite entries in the gradient step (L=" + std::to_string(lipschitz) +
                                           ")");
  const double threshold = 2.0 * lambda / lipschitz;
  WeightMatrix out = step;
  for (Eigen::Index i = 0; i < out.rows(); ++i)
    if (!(out.row(i).squaredNorm() > threshold)) out.row(i).setZero();
  return out;
}

WeightMatrix iht_update(const WeightMatrix& weights, const Matrix& grad, double lambda, double lipschitz) {
  return row_hard_threshold(gradient_step(weights, grad, lipschitz), lambda, lipschitz);
}

WeightMatrix iht_update(const WeightMatrix& weights, double lambda, double lipschitz, const CenteredData& data) {
  return iht_update(weights, gradient(weights, data), lambda, lipschitz);
}

}  // namespace hiht
