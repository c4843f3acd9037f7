#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hiht {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/**
 * Labelled samples in the column convention used throughout the library:
 * features is d x N (one column per sample), labels[j] is the zero-based
 * class of column j.
 *
 * class_names maps class index -> original label token (may be empty for
 * generated data). feature_names is either empty or has exactly d entries.
 */
struct Dataset {
  Matrix features;
  std::vector<int> labels;
  int class_count = 0;
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;

  Eigen::Index feature_count() const { return features.rows(); }
  Eigen::Index sample_count() const { return features.cols(); }

  // Throws DegenerateDataset / InvalidLabel / Shape when an invariant fails:
  // N >= 2, d >= 1, C >= 2, labels in range, every class present.
  void validate() const;

  // Columns at the given sample positions, in the order given.
  Dataset subset(const std::vector<std::size_t>& samples) const;
};

/// C x N binary indicator matrix; each column has exactly one 1.
struct LabelMatrix {
  Matrix values;
};

/// Column-centered design and targets plus the means that were removed.
struct CenteredData {
  Matrix x_centered;  // d x N
  Matrix y_centered;  // C x N
  Vector x_mean;      // d
  Vector y_mean;      // C

  Eigen::Index feature_count() const { return x_centered.rows(); }
  Eigen::Index sample_count() const { return x_centered.cols(); }
  Eigen::Index class_count() const { return y_centered.rows(); }
};

LabelMatrix one_hot_encode(const std::vector<int>& labels, int class_count);

// Row-mean subtraction; equivalent to right-multiplying by I - (1/N)11^T.
CenteredData center(const Dataset& dataset);
CenteredData center(const Matrix& features, const Matrix& targets);

struct Split {
  Dataset train;
  Dataset test;
  std::vector<std::size_t> train_samples;
  std::vector<std::size_t> test_samples;
};

// Per class, ceil(fraction * n_c) samples go to train, clamped so at least one
// remains for test. Sample order inside each part follows the original order.
Split stratified_split(const Dataset& dataset, double train_fraction, std::uint64_t seed);

// Number of training samples a class of size n receives.
std::size_t stratified_train_count(std::size_t class_size, double train_fraction);

/// Z-score statistics estimated on one matrix and applied to others.
struct Standardizer {
  Vector mean;
  Vector scale;  // 1 for constant features

  static Standardizer fit(const Matrix& features);
  Matrix apply(const Matrix& features) const;
};

// Deterministic 64-bit seed mixing (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

}  // namespace hiht
