#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hiht/l21.hpp"
#include "hiht/solver.hpp"

namespace hiht {

// Rows of features at the given indices, in ascending index order.
Matrix restrict_features(const Matrix& features, std::vector<std::size_t> rows);

/**
 * Euclidean k-nearest-neighbour majority vote, one prediction per column of
 * test. Equal distances are ordered by training index. A tied vote goes to
 * the class with the largest summed inverse distance (an exact match counts
 * as infinite), then to the smallest class index.
 */
std::vector<int> knn_predict(const Matrix& train, const std::vector<int>& train_labels, const Matrix& test, int k);

struct SoftmaxConfig {
  double ridge = 1e-4;
  int max_iterations = 2000;
  double tolerance = 1e-5;  // relative to max(1, initial gradient norm)
  double initial_step = 1.0;
};

struct SoftmaxModel {
  Matrix weights;  // d x C
  Vector bias;     // C
  int iterations = 0;
};

// Multinomial logistic regression by full-batch gradient descent with
// step halving on mean cross-entropy + ridge/2 ||W||^2.
SoftmaxModel softmax_train(const Matrix& train, const std::vector<int>& labels, int class_count,
                           const SoftmaxConfig& config = {});

// argmax of Wᵀx + b; ties go to the smallest class index.
std::vector<int> softmax_predict(const SoftmaxModel& model, const Matrix& test);

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

// Indices of the k largest row norms, ties by smaller index; returned sorted.
std::vector<std::size_t> top_rows_by_norm(const Matrix& weights, std::size_t k);

/**
 * Features for a requested count from an l2,0 path: the support of
 * select_by_count(path, target). When that support is smaller than target the
 * remaining slots are filled from the densest point's row norms.
 */
std::vector<std::size_t> select_features(const RegularizationPath& path, std::size_t target);

enum class Method { Hiht, Ahiht, L21, AllFeatures };

const char* to_string(Method method);
Method parse_method(const std::string& name);

enum class Classifier { Knn, Softmax };

const char* to_string(Classifier classifier);

struct ExperimentConfig {
  Method method = Method::Hiht;
  SolverConfig solver;
  std::vector<double> lambdas{1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1e0};  // l2,1 grid
  std::vector<std::size_t> feature_counts;                           // default 20, 40, ..., 400
  std::vector<Classifier> classifiers{Classifier::Knn, Classifier::Softmax};
  int trials = 10;
  std::uint64_t seed = 0;
  double train_fraction = 2.0 / 3.0;
  int knn_k = 5;
  bool standardize = false;
  SoftmaxConfig softmax;

  ExperimentConfig();
};

std::vector<std::size_t> default_feature_counts();

struct TrialResult {
  std::string method;
  int trial = 0;
  std::optional<double> lambda;  // solver lambda behind the selection (none for all-features)
  std::size_t target_count = 0;
  std::vector<std::size_t> selected_features;
  std::string classifier;
  double accuracy = 0.0;
  double train_seconds = 0.0;
};

struct CurvePoint {
  std::string classifier;
  std::size_t target_count = 0;
  std::optional<double> lambda;  // grid value for l2,1, none otherwise
  double mean_accuracy = 0.0;
  double accuracy_std = 0.0;
  double mean_feature_count = 0.0;
  int trials = 0;
};

struct ExperimentReport {
  std::string dataset_name;
  std::string method;
  ExperimentConfig config;
  std::vector<std::uint64_t> seeds;
  std::vector<TrialResult> trials;
  std::vector<CurvePoint> curve;  // per classifier and target count
  std::vector<CurvePoint> best;   // per classifier
  double mean_accuracy = 0.0;     // of the overall best curve point
  double accuracy_std = 0.0;
  double mean_feature_count = 0.0;
  double mean_train_seconds = 0.0;
};

// Mean, sample standard deviation and mean selected size over matching records.
CurvePoint aggregate(const std::vector<TrialResult>& records, const std::string& classifier,
                     std::size_t target_count, std::optional<double> lambda);

ExperimentReport run_experiment(const Dataset& dataset, const std::string& dataset_name,
                                const ExperimentConfig& config);

}  // namespace hiht
