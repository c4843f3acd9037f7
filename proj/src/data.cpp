#include "hiht/data.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "hiht/error.hpp"

namespace hiht {

void Dataset::validate() const {
  const auto d = features.rows();
  const auto n = features.cols();
  if (n < 2) throw Error(ErrorKind::DegenerateDataset, "need at least 2 samples, got " + std::to_string(n));
  if (d < 1) throw Error(ErrorKind::DegenerateDataset, "need at least 1 feature");
  if (class_count < 2)
    throw Error(ErrorKind::DegenerateDataset, "need at least 2 classes, got " + std::to_string(class_count));
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw Error(ErrorKind::Shape, "label count " + std::to_string(labels.size()) + " != sample count " +
                                      std::to_string(n));
  if (!feature_names.empty() && static_cast<Eigen::Index>(feature_names.size()) != d)
    throw Error(ErrorKind::Shape, "feature_names has " + std::to_string(feature_names.size()) +
                                      " entries, expected " + std::to_string(d));
  std::vector<int> seen(static_cast<std::size_t>(class_count), 0);
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const int c = labels[j];
    if (c < 0 || c >= class_count)
      throw Error(ErrorKind::InvalidLabel,
                  "label " + std::to_string(c) + " at sample " + std::to_string(j) + " outside [0, " +
                      std::to_string(class_count) + ")");
    seen[static_cast<std::size_t>(c)] = 1;
  }
  for (int c = 0; c < class_count; ++c)
    if (!seen[static_cast<std::size_t>(c)])
      throw Error(ErrorKind::DegenerateDataset, "class " + std::to_string(c) + " has no samples");
}

Dataset Dataset::subset(const std::vector<std::size_t>& samples) const {
  Dataset out;
  out.features.resize(features.rows(), static_cast<Eigen::Index>(samples.size()));
  out.labels.reserve(samples.size());
  for (std::size_t j = 0; j < samples.size(); ++j) {
    out.features.col(static_cast<Eigen::Index>(j)) = features.col(static_cast<Eigen::Index>(samples[j]));
    out.labels.push_back(labels[samples[j]]);
  }
  out.class_count = class_count;
  out.feature_names = feature_names;
  out.class_names = class_names;
  return out;
}

LabelMatrix one_hot_encode(const std::vector<int>& labels, int class_count) {
  if (labels.empty()) throw Error(ErrorKind::InvalidLabel, "empty label list");
  if (class_count < 1) throw Error(ErrorKind::Parameter, "class_count must be positive");
  LabelMatrix out{Matrix::Zero(class_count, static_cast<Eigen::Index>(labels.size()))};
  for (std::size_t j = 0; j < labels.size(); ++j) {
    const int c = labels[j];
    if (c < 0 || c >= class_count)
      throw Error(ErrorKind::InvalidLabel, "label " + std::to_string(c) + " at index " + std::to_string(j) +
                                               " outside [0, " + std::to_string(class_count) + ")");
    out.values(c, static_cast<Eigen::Index>(j)) = 1.0;
  }
  return out;
}

CenteredData center(const Matrix& features, const Matrix& targets) {
  if (features.cols() < 2)
    throw Error(ErrorKind::DegenerateDataset, "centering needs at least 2 samples, got " +
                                                  std::to_string(features.cols()));
  if (features.cols() != targets.cols())
    throw Error(ErrorKind::Shape, "features have " + std::to_string(features.cols()) + " columns, targets " +
                                      std::to_string(targets.cols()));
  CenteredData out;
  out.x_mean = features.rowwise().mean();
  out.y_mean = targets.rowwise().mean();
  out.x_centered = features.colwise() - out.x_mean;
  out.y_centered = targets.colwise() - out.y_mean;
  return out;
}

CenteredData center(const Dataset& dataset) {
  if (dataset.sample_count() < 2)
    throw Error(ErrorKind::DegenerateDataset, "centering needs at least 2 samples");
  return center(dataset.features, one_hot_encode(dataset.labels, dataset.class_count).values);
}

std::size_t stratified_train_count(std::size_t class_size, double train_fraction) {
  // The small slack keeps exact products such as (2/3)*6 from rounding up.
  const double raw = std::ceil(train_fraction * static_cast<double>(class_size) - 1e-9);
  auto count = static_cast<std::size_t>(std::max(raw, 1.0));
  return std::min(count, class_size - 1);
}

Split stratified_split(const Dataset& dataset, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(ErrorKind::Parameter, "train_fraction must lie in (0, 1)");
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(dataset.class_count));
  for (std::size_t j = 0; j < dataset.labels.size(); ++j)
    by_class.at(static_cast<std::size_t>(dataset.labels[j])).push_back(j);

  std::mt19937_64 rng(seed);
  Split split;
  for (std::size_t c = 0; c < by_class.size(); ++c) {
    auto& members = by_class[c];
    if (members.size() < 2)
      throw Error(ErrorKind::Stratification,
                  "class " + std::to_string(c) + " has " + std::to_string(members.size()) +
                      " sample(s); stratification needs at least 2");
    // Fisher-Yates with an explicit uniform draw so the permutation does not
    // depend on the standard library's shuffle implementation.
    for (std::size_t i = members.size() - 1; i > 0; --i) {
      const std::size_t k = static_cast<std::size_t>(rng() % (i + 1));
      std::swap(members[i], members[k]);
    }
    const std::size_t n_train = stratified_train_count(members.size(), train_fraction);
    split.train_samples.insert(split.train_samples.end(), members.begin(),
                               members.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test_samples.insert(split.test_samples.end(),
                              members.begin() + static_cast<std::ptrdiff_t>(n_train), members.end());
  }
  std::sort(split.train_samples.begin(), split.train_samples.end());
  std::sort(split.test_samples.begin(), split.test_samples.end());
  split.train = dataset.subset(split.train_samples);
  split.test = dataset.subset(split.test_samples);
  return split;
}

Standardizer Standardizer::fit(const Matrix& features) {
  Standardizer s;
  const auto n = static_cast<double>(features.cols());
  s.mean = features.rowwise().mean();
  s.scale = ((features.colwise() - s.mean).array().square().rowwise().sum() / std::max(n - 1.0, 1.0)).sqrt();
  for (Eigen::Index i = 0; i < s.scale.size(); ++i)
    if (!(s.scale[i] > 0.0)) s.scale[i] = 1.0;
  return s;
}

Matrix Standardizer::apply(const Matrix& features) const {
  if (features.rows() != mean.size())
    throw Error(ErrorKind::Shape, "standardizer fitted on " + std::to_string(mean.size()) +
                                      " features, applied to " + std::to_string(features.rows()));
  return (features.colwise() - mean).array().colwise() / scale.array();
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace hiht
