#include "hiht/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hiht/error.hpp"

namespace hiht {

Matrix restrict_features(const Matrix& features, std::vector<std::size_t> rows) {
  std::sort(rows.begin(), rows.end());
  if (std::adjacent_find(rows.begin(), rows.end()) != rows.end())
    throw Error(ErrorKind::Parameter, "duplicate feature index in support");
  Matrix out(static_cast<Eigen::Index>(rows.size()), features.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= static_cast<std::size_t>(features.rows()))
      throw Error(ErrorKind::Parameter, "feature index " + std::to_string(rows[i]) + " out of range for " +
                                            std::to_string(features.rows()) + " features");
    out.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
  }
  return out;
}

std::vector<int> knn_predict(const Matrix& train, const std::vector<int>& train_labels, const Matrix& test, int k) {
  const auto n_train = static_cast<std::size_t>(train.cols());
  if (train_labels.size() != n_train) throw Error(ErrorKind::Shape, "train label count differs from train samples");
  if (k < 1 || static_cast<std::size_t>(k) > n_train)
    throw Error(ErrorKind::Parameter, "k=" + std::to_string(k) + " must lie in [1, " + std::to_string(n_train) + "]");
  if (train.rows() != test.rows()) throw Error(ErrorKind::Shape, "train and test feature counts differ");

  const int classes = *std::max_element(train_labels.begin(), train_labels.end()) + 1;
  std::vector<int> predicted;
  predicted.reserve(static_cast<std::size_t>(test.cols()));
  std::vector<std::pair<double, std::size_t>> dist(n_train);
  std::vector<int> votes(static_cast<std::size_t>(classes));
  std::vector<double> weight(static_cast<std::size_t>(classes));
  for (Eigen::Index j = 0; j < test.cols(); ++j) {
    for (std::size_t t = 0; t < n_train; ++t)
      dist[t] = {(train.col(static_cast<Eigen::Index>(t)) - test.col(j)).squaredNorm(), t};
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    std::fill(votes.begin(), votes.end(), 0);
    std::fill(weight.begin(), weight.end(), 0.0);
    for (int m = 0; m < k; ++m) {
      const auto c = static_cast<std::size_t>(train_labels[dist[static_cast<std::size_t>(m)].second]);
      const double d = std::sqrt(dist[static_cast<std::size_t>(m)].first);
      ++votes[c];
      weight[c] += d > 0.0 ? 1.0 / d : std::numeric_limits<double>::infinity();
    }
    int best = 0;
    for (int c = 1; c < classes; ++c) {
      const auto uc = static_cast<std::size_t>(c);
      const auto ub = static_cast<std::size_t>(best);
      if (votes[uc] > votes[ub] || (votes[uc] == votes[ub] && weight[uc] > weight[ub])) best = c;
    }
    predicted.push_back(best);
  }
  return predicted;
}

namespace {

// Column-wise softmax probabilities of scores (C x N), computed stably.
Matrix softmax_columns(const Matrix& scores) {
  Matrix p = scores.rowwise() - scores.colwise().maxCoeff();
  p = p.array().exp();
  return p.array().rowwise() / p.colwise().sum().array();
}

double cross_entropy(const Matrix& scores, const std::vector<int>& labels) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < scores.cols(); ++j) {
    const double m = scores.col(j).maxCoeff();
    const double lse = m + std::log((scores.col(j).array() - m).exp().sum());
    total += lse - scores(labels[static_cast<std::size_t>(j)], j);
  }
  return total / static_cast<double>(scores.cols());
}

}  // namespace

SoftmaxModel softmax_train(const Matrix& train, const std::vector<int>& labels, int class_count,
                           const SoftmaxConfig& config) {
  const auto n = train.cols();
  if (static_cast<Eigen::Index>(labels.size()) != n) throw Error(ErrorKind::Shape, "label count differs from samples");
  if (class_count < 2) throw Error(ErrorKind::Parameter, "softmax needs at least 2 classes");
  if (n == 0) throw Error(ErrorKind::DegenerateDataset, "no training samples");
  const Matrix targets = one_hot_encode(labels, class_count).values;

  SoftmaxModel model;
  model.weights = Matrix::Zero(train.rows(), class_count);
  model.bias = Vector::Zero(class_count);
  const double inv_n = 1.0 / static_cast<double>(n);

  auto objective = [&](const Matrix& w, const Vector& b) {
    const Matrix scores = (w.transpose() * train).colwise() + b;
    return cross_entropy(scores, labels) + 0.5 * config.ridge * w.squaredNorm();
  };

  double value = objective(model.weights, model.bias);
  double step = config.initial_step;
  double stop = -1.0;
  for (int it = 0; it < config.max_iterations; ++it) {
    const Matrix scores = (model.weights.transpose() * train).colwise() + model.bias;
    const Matrix diff = (softmax_columns(scores) - targets) * inv_n;  // C x N
    const Matrix grad_w = train * diff.transpose() + config.ridge * model.weights;
    const Vector grad_b = diff.rowwise().sum();
    const double grad_sq = grad_w.squaredNorm() + grad_b.squaredNorm();
    if (stop < 0.0) stop = config.tolerance * std::max(1.0, std::sqrt(grad_sq));
    if (std::sqrt(grad_sq) < stop) break;

    bool accepted = false;
    for (int halving = 0; halving < 60; ++halving) {
      const Matrix w = model.weights - step * grad_w;
      const Vector b = model.bias - step * grad_b;
      const double candidate = objective(w, b);
      if (candidate <= value - 1e-4 * step * grad_sq) {
        model.weights = w;
        model.bias = b;
        value = candidate;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    model.iterations = it + 1;
    if (!accepted) break;  // step underflow: no further progress possible
    step *= 2.0;
  }
  if (!std::isfinite(value)) throw Error(ErrorKind::Divergence, "softmax training produced a non-finite loss");
  return model;
}

std::vector<int> softmax_predict(const SoftmaxModel& model, const Matrix& test) {
  if (test.rows() != model.weights.rows())
    throw Error(ErrorKind::Shape, "model expects " + std::to_string(model.weights.rows()) + " features, got " +
                                      std::to_string(test.rows()));
  const Matrix scores = (model.weights.transpose() * test).colwise() + model.bias;
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(test.cols()));
  for (Eigen::Index j = 0; j < scores.cols(); ++j) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.rows(); ++c)
      if (scores(c, j) > scores(best, j)) best = c;
    out.push_back(static_cast<int>(best));
  }
  return out;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size())
    throw Error(ErrorKind::Shape, "predicted has " + std::to_string(predicted.size()) + " entries, truth " +
                                      std::to_string(truth.size()));
  if (truth.empty()) throw Error(ErrorKind::Parameter, "accuracy of an empty prediction list");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += predicted[i] == truth[i] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

std::vector<std::size_t> top_rows_by_norm(const Matrix& weights, std::size_t k) {
  const Vector norms = row_norms(weights);
  std::vector<std::size_t> order(static_cast<std::size_t>(norms.size()));
  std::iota(order.begin(), order.end(), 0);
  k = std::min(k, order.size());
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return norms[static_cast<Eigen::Index>(a)] > norms[static_cast<Eigen::Index>(b)];
  });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<std::size_t> select_features(const RegularizationPath& path, std::size_t target) {
  const PathPoint& chosen = select_by_count(path, target);
  std::vector<std::size_t> selected = chosen.support;
  if (selected.size() >= target) return selected;

  const PathPoint* densest = &path.points.front();
  for (const PathPoint& p : path.points)
    if (p.support_size > densest->support_size) densest = &p;
  const Vector norms = row_norms(densest->weights);
  std::vector<std::size_t> order(static_cast<std::size_t>(norms.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return norms[static_cast<Eigen::Index>(a)] > norms[static_cast<Eigen::Index>(b)];
  });
  std::vector<char> taken(order.size(), 0);
  for (std::size_t i : selected) taken[i] = 1;
  for (std::size_t i : order) {
    if (selected.size() >= target) break;
    if (!taken[i]) selected.push_back(i);
  }
  std::sort(selected.begin(), selected.end());
  return selected;
}

const char* to_string(Method method) {
  switch (method) {
    case Method::Hiht: return "hiht";
    case Method::Ahiht: return "ahiht";
    case Method::L21: return "l21";
    case Method::AllFeatures: return "all";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "hiht") return Method::Hiht;
  if (name == "ahiht") return Method::Ahiht;
  if (name == "l21") return Method::L21;
  if (name == "all" || name == "baseline") return Method::AllFeatures;
  throw Error(ErrorKind::Usage, "unknown method '" + name + "' (expected hiht, ahiht, l21 or all)");
}

const char* to_string(Classifier classifier) { return classifier == Classifier::Knn ? "knn" : "softmax"; }

std::vector<std::size_t> default_feature_counts() {
  std::vector<std::size_t> counts;
  for (std::size_t c = 20; c <= 400; c += 20) counts.push_back(c);
  return counts;
}

ExperimentConfig::ExperimentConfig() : feature_counts(default_feature_counts()) {}

CurvePoint aggregate(const std::vector<TrialResult>& records, const std::string& classifier,
                     std::size_t target_count, std::optional<double> lambda) {
  CurvePoint point;
  point.classifier = classifier;
  point.target_count = target_count;
  point.lambda = lambda;
  std::vector<double> acc;
  double features = 0.0;
  for (const TrialResult& r : records) {
    if (r.classifier != classifier || r.target_count != target_count) continue;
    if (lambda && (!r.lambda || *r.lambda != *lambda)) continue;
    acc.push_back(r.accuracy);
    features += static_cast<double>(r.selected_features.size());
  }
  point.trials = static_cast<int>(acc.size());
  if (acc.empty()) return point;
  const double n = static_cast<double>(acc.size());
  point.mean_accuracy = std::accumulate(acc.begin(), acc.end(), 0.0) / n;
  point.mean_feature_count = features / n;
  if (acc.size() > 1) {
    double ss = 0.0;
    for (double a : acc) ss += (a - point.mean_accuracy) * (a - point.mean_accuracy);
    point.accuracy_std = std::sqrt(ss / (n - 1.0));
  }
  return point;
}

namespace {

bool better(const CurvePoint& a, const CurvePoint& b) {
  if (a.mean_accuracy != b.mean_accuracy) return a.mean_accuracy > b.mean_accuracy;
  if (a.mean_feature_count != b.mean_feature_count) return a.mean_feature_count < b.mean_feature_count;
  return a.target_count < b.target_count;
}

}  // namespace

ExperimentReport run_experiment(const Dataset& dataset, const std::string& dataset_name,
                                const ExperimentConfig& config) {
  dataset.validate();
  if (config.trials < 1) throw Error(ErrorKind::Parameter, "trials must be >= 1");
  if (config.classifiers.empty()) throw Error(ErrorKind::Parameter, "no classifier requested");
  if (config.method != Method::AllFeatures && config.feature_counts.empty())
    throw Error(ErrorKind::Parameter, "feature-count grid is empty");
  if (config.method == Method::L21 && config.lambdas.empty())
    throw Error(ErrorKind::Parameter, "lambda grid is empty");
  config.solver.validate();

  ExperimentReport report;
  report.dataset_name = dataset_name;
  report.method = to_string(config.method);
  report.config = config;
  const auto d = static_cast<std::size_t>(dataset.feature_count());

  double total_seconds = 0.0;
  for (int trial = 0; trial < config.trials; ++trial) {
    const std::uint64_t trial_seed = mix_seed(config.seed, static_cast<std::uint64_t>(trial));
    report.seeds.push_back(trial_seed);
    Split split;
    try {
      split = stratified_split(dataset, config.train_fraction, trial_seed);
    } catch (const Error& e) {
      throw Error(e.kind(), "trial " + std::to_string(trial) + ": " + e.what());
    }
    Matrix train_x = split.train.features;
    Matrix test_x = split.test.features;
    if (config.standardize) {
      const Standardizer z = Standardizer::fit(train_x);
      train_x = z.apply(train_x);
      test_x = z.apply(test_x);
    }

    // (lambda, target, selected rows) triples produced by the selection method.
    struct Selection {
      std::optional<double> lambda;
      std::size_t target;
      std::vector<std::size_t> rows;
    };
    std::vector<Selection> selections;
    double seconds = 0.0;
    try {
      const CenteredData centered = center(train_x, one_hot_encode(split.train.labels, dataset.class_count).values);
      switch (config.method) {
        case Method::Hiht:
        case Method::Ahiht: {
          const Algorithm algorithm = config.method == Method::Hiht ? Algorithm::Hiht : Algorithm::Ahiht;
          const RegularizationPath path = solve_path(algorithm, centered, config.solver);
          seconds = path.wall_seconds;
          for (std::size_t target : config.feature_counts) {
            const std::size_t capped = std::min(target, d);
            selections.push_back({select_by_count(path, capped).lambda, target, select_features(path, capped)});
          }
          break;
        }
        case Method::L21:
          for (double lambda : config.lambdas) {
            const L21Result fit = l21_solve(centered, lambda, config.solver);
            seconds += fit.wall_seconds;
            for (std::size_t target : config.feature_counts)
              selections.push_back({lambda, target, top_rows_by_norm(fit.weights, std::min(target, d))});
          }
          break;
        case Method::AllFeatures: {
          std::vector<std::size_t> all(d);
          std::iota(all.begin(), all.end(), 0);
          selections.push_back({std::nullopt, d, std::move(all)});
          break;
        }
      }
    } catch (const Error& e) {
      throw Error(e.kind(), "trial " + std::to_string(trial) + ": " + e.what());
    }
    total_seconds += seconds;

    for (const Selection& sel : selections) {
      const Matrix tr = restrict_features(train_x, sel.rows);
      const Matrix te = restrict_features(test_x, sel.rows);
      for (Classifier classifier : config.classifiers) {
        std::vector<int> predicted;
        if (classifier == Classifier::Knn) {
          predicted = knn_predict(tr, split.train.labels, te, config.knn_k);
        } else {
          const SoftmaxModel model = softmax_train(tr, split.train.labels, dataset.class_count, config.softmax);
          predicted = softmax_predict(model, te);
        }
        TrialResult r;
        r.method = report.method;
        r.trial = trial;
        r.lambda = sel.lambda;
        r.target_count = sel.target;
        r.selected_features = sel.rows;
        r.classifier = to_string(classifier);
        r.accuracy = accuracy(predicted, split.test.labels);
        r.train_seconds = seconds;
        report.trials.push_back(std::move(r));
      }
    }
  }
  report.mean_train_seconds = total_seconds / static_cast<double>(config.trials);

  std::vector<std::size_t> targets =
      config.method == Method::AllFeatures ? std::vector<std::size_t>{d} : config.feature_counts;
  for (Classifier classifier : config.classifiers) {
    const std::string name = to_string(classifier);
    std::optional<CurvePoint> best_for_classifier;
    for (std::size_t target : targets) {
      CurvePoint point;
      if (config.method == Method::L21) {
        // Tune lambda per count: keep the grid value with the highest mean accuracy.
        std::optional<CurvePoint> tuned;
        for (double lambda : config.lambdas) {
          CurvePoint candidate = aggregate(report.trials, name, target, lambda);
          if (!tuned || candidate.mean_accuracy > tuned->mean_accuracy) tuned = candidate;
        }
        point = *tuned;
      } else {
        point = aggregate(report.trials, name, target, std::nullopt);
      }
      if (!best_for_classifier || better(point, *best_for_classifier)) best_for_classifier = point;
      report.curve.push_back(std::move(point));
    }
    report.best.push_back(*best_for_classifier);
  }
  const CurvePoint* overall = &report.best.front();
  for (const CurvePoint& p : report.best)
    if (better(p, *overall)) overall = &p;
  report.mean_accuracy = overall->mean_accuracy;
  report.accuracy_std = overall->accuracy_std;
  report.mean_feature_count = overall->mean_feature_count;
  return report;
}

}  // namespace hiht
