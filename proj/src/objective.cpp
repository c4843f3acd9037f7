#include "hiht/objective.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "hiht/error.hpp"

namespace hiht {

namespace {

std::string shape_of(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

void check_weight_shape(const WeightMatrix& weights, const CenteredData& data) {
  if (data.y_centered.cols() != data.x_centered.cols())
    throw Error(ErrorKind::Shape, "centered X is " + shape_of(data.x_centered) + " but Y is " +
                                      shape_of(data.y_centered));
  if (weights.rows() != data.x_centered.rows() || weights.cols() != data.y_centered.rows())
    throw Error(ErrorKind::Shape, "weights are " + shape_of(weights) + ", expected " +
                                      std::to_string(data.x_centered.rows()) + "x" +
                                      std::to_string(data.y_centered.rows()));
}

double loss(const WeightMatrix& weights, const CenteredData& data) {
  check_weight_shape(weights, data);
  return 0.5 * (weights.transpose() * data.x_centered - data.y_centered).squaredNorm();
}

Matrix gradient(const WeightMatrix& weights, const CenteredData& data) {
  check_weight_shape(weights, data);
  const Matrix residual_t = data.x_centered.transpose() * weights - data.y_centered.transpose();  // N x C
  return data.x_centered * residual_t;
}

std::size_t support_size(const WeightMatrix& weights) {
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < weights.rows(); ++i)
    if ((weights.row(i).array() != 0.0).any()) ++count;
  return count;
}

std::vector<std::size_t> support(const WeightMatrix& weights) {
  std::vector<std::size_t> rows;
  for (Eigen::Index i = 0; i < weights.rows(); ++i)
    if ((weights.row(i).array() != 0.0).any()) rows.push_back(static_cast<std::size_t>(i));
  return rows;
}

double objective_value(const WeightMatrix& weights, double lambda, const CenteredData& data) {
  if (!(lambda >= 0.0)) throw Error(ErrorKind::Parameter, "lambda must be >= 0, got " + std::to_string(lambda));
  return loss(weights, data) + lambda * static_cast<double>(support_size(weights));
}

BiasVector recover_bias(const WeightMatrix& weights, const Matrix& features, const Matrix& targets) {
  if (weights.rows() != features.rows() || weights.cols() != targets.rows() || features.cols() != targets.cols())
    throw Error(ErrorKind::Shape, "weights " + shape_of(weights) + ", features " + shape_of(features) +
                                      ", targets " + shape_of(targets));
  return (targets - weights.transpose() * features).rowwise().mean();
}

BiasVector recover_bias(const WeightMatrix& weights, const Dataset& dataset, const LabelMatrix& labels) {
  return recover_bias(weights, dataset.features, labels.values);
}

double uncentered_objective(const WeightMatrix& weights, const BiasVector& bias, double lambda,
                            const Matrix& features, const Matrix& targets) {
  if (bias.size() != targets.rows())
    throw Error(ErrorKind::Shape, "bias has " + std::to_string(bias.size()) + " entries, expected " +
                                      std::to_string(targets.rows()));
  const Matrix residual = (weights.transpose() * features).colwise() + bias - targets;
  return 0.5 * residual.squaredNorm() + lambda * static_cast<double>(support_size(weights));
}

double spectral_bound(const CenteredData& data, const SpectralOptions& options) {
  constexpr double kFloor = 1e-12;
  constexpr double kSafety = 1.01;
  if (!(options.tolerance > 0.0)) throw Error(ErrorKind::Parameter, "power iteration tolerance must be > 0");
  const Matrix& x = data.x_centered;
  if (x.size() == 0) return kFloor;

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(x.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  v.normalize();

  double estimate = 0.0;
  for (int it = 0; it < options.max_iterations; ++it) {
    const Vector xtv = x.transpose() * v;
    const double rayleigh = xtv.squaredNorm();
    Vector next = x * xtv;
    const double norm = next.norm();
    if (!(norm > 0.0)) break;
    next /= norm;
    const bool converged = it > 0 && std::abs(rayleigh - estimate) <= options.tolerance * rayleigh;
    estimate = rayleigh;
    v = std::move(next);
    if (converged) break;
  }
  // The Rayleigh quotient of the final iterate is at least as good as the last one recorded.
  estimate = std::max(estimate, (x.transpose() * v).squaredNorm());
  return std::max(kSafety * estimate, kFloor);
}

Vector row_norms(const Matrix& weights) { return weights.rowwise().norm(); }

}  // namespace hiht
