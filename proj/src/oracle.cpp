#include "hiht/oracle.hpp"

#include <bit>
#include <limits>

#include "hiht/error.hpp"

namespace hiht {

namespace {

constexpr double kRidge = 1e-10;

std::vector<Eigen::Index> rows_of(std::uint32_t mask) {
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; mask != 0; ++i, mask >>= 1)
    if (mask & 1U) rows.push_back(i);
  return rows;
}

}  // namespace

SupportEnumeration::SupportEnumeration(const CenteredData& data, int max_features) : data_(&data) {
  const auto d = data.feature_count();
  if (max_features > 24) max_features = 24;
  if (d > max_features)
    throw Error(ErrorKind::Refusal, "brute-force enumeration limited to " + std::to_string(max_features) +
                                        " features, data has " + std::to_string(d));
  const std::uint32_t count = 1U << static_cast<unsigned>(d);
  losses_.resize(count);
  for (std::uint32_t mask = 0; mask < count; ++mask) losses_[mask] = loss(fit(mask), data);
}

WeightMatrix SupportEnumeration::fit(std::uint32_t mask) const {
  const CenteredData& data = *data_;
  WeightMatrix w = WeightMatrix::Zero(data.feature_count(), data.class_count());
  const auto rows = rows_of(mask);
  if (rows.empty()) return w;
  const auto k = static_cast<Eigen::Index>(rows.size());
  Matrix xs(k, data.sample_count());
  for (Eigen::Index r = 0; r < k; ++r) xs.row(r) = data.x_centered.row(rows[static_cast<std::size_t>(r)]);
  Matrix gram = xs * xs.transpose();
  gram.diagonal().array() += kRidge;
  const Matrix ws = gram.ldlt().solve(xs * data.y_centered.transpose());
  for (Eigen::Index r = 0; r < k; ++r) w.row(rows[static_cast<std::size_t>(r)]) = ws.row(r);
  return w;
}

OracleSolution SupportEnumeration::solve(double lambda) const {
  if (!(lambda >= 0.0)) throw Error(ErrorKind::Parameter, "lambda must be >= 0");
  std::uint32_t best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < losses_.size(); ++mask) {
    const double value = losses_[mask] + lambda * static_cast<double>(std::popcount(mask));
    if (value < best_value) {
      best_value = value;
      best = mask;
    }
  }
  OracleSolution out;
  out.weights = fit(best);
  out.objective = objective_value(out.weights, lambda, *data_);
  out.support = support(out.weights);
  return out;
}

double SupportEnumeration::best_loss_of_size(std::size_t k) const {
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < losses_.size(); ++mask)
    if (static_cast<std::size_t>(std::popcount(mask)) == k) best = std::min(best, losses_[mask]);
  return best;
}

OracleSolution brute_force_oracle(const CenteredData& data, double lambda, int max_features) {
  return SupportEnumeration(data, max_features).solve(lambda);
}

}  // namespace hiht
