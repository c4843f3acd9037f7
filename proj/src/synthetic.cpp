#include "hiht/synthetic.hpp"

#include <algorithm>
#include <numeric>

#include "hiht/error.hpp"

namespace hiht {

namespace {

std::vector<int> argmax_columns(const Matrix& scores) {
  std::vector<int> out(static_cast<std::size_t>(scores.cols()));
  for (Eigen::Index j = 0; j < scores.cols(); ++j) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < scores.rows(); ++c)
      if (scores(c, j) > scores(best, j)) best = c;
    out[static_cast<std::size_t>(j)] = static_cast<int>(best);
  }
  return out;
}

}  // namespace

std::vector<int> bayes_predict(const Matrix& true_weights, const Matrix& features) {
  return argmax_columns(true_weights.transpose() * features);
}

Dataset sample_from_model(const Matrix& true_weights, double noise_sigma, int samples, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Dataset out;
  out.class_count = static_cast<int>(true_weights.cols());
  out.features.resize(true_weights.rows(), samples);
  for (Eigen::Index j = 0; j < out.features.cols(); ++j)
    for (Eigen::Index i = 0; i < out.features.rows(); ++i) out.features(i, j) = normal(rng);
  Matrix scores = true_weights.transpose() * out.features;
  if (noise_sigma > 0.0)
    for (Eigen::Index j = 0; j < scores.cols(); ++j)
      for (Eigen::Index c = 0; c < scores.rows(); ++c) scores(c, j) += noise_sigma * normal(rng);
  out.labels = argmax_columns(scores);
  return out;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.features < 1 || spec.classes < 2)
    throw Error(ErrorKind::Parameter, "need features >= 1 and classes >= 2");
  if (spec.support_size < 0 || spec.support_size > spec.features)
    throw Error(ErrorKind::Parameter, "support_size must lie in [0, features]");
  if (spec.samples < 4 * spec.classes) throw Error(ErrorKind::Parameter, "need samples >= 4 * classes");
  if (!(spec.noise_sigma >= 0.0)) throw Error(ErrorKind::Parameter, "noise_sigma must be >= 0");
  if (spec.support_size == 0 && spec.noise_sigma == 0.0)
    throw Error(ErrorKind::Parameter, "support_size 0 with zero noise gives a single class");

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  SyntheticData out;
  std::vector<std::size_t> rows(static_cast<std::size_t>(spec.features));
  std::iota(rows.begin(), rows.end(), 0);
  for (std::size_t i = 0; i < static_cast<std::size_t>(spec.support_size); ++i) {
    const std::size_t k = i + static_cast<std::size_t>(rng() % (rows.size() - i));
    std::swap(rows[i], rows[k]);
  }
  out.support.assign(rows.begin(), rows.begin() + spec.support_size);
  std::sort(out.support.begin(), out.support.end());

  out.true_weights = Matrix::Zero(spec.features, spec.classes);
  for (std::size_t row : out.support) {
    Vector w(spec.classes);
    do {
      for (Eigen::Index c = 0; c < w.size(); ++c) w[c] = normal(rng);
      w.array() -= w.mean();
    } while (!(w.norm() > 1e-8));
    out.true_weights.row(static_cast<Eigen::Index>(row)) = w.normalized().transpose();
  }

  constexpr int kMaxDraws = 1000;
  for (int draw = 0; draw < kMaxDraws; ++draw) {
    Dataset sample = sample_from_model(out.true_weights, spec.noise_sigma, spec.samples, rng);
    std::vector<int> counts(static_cast<std::size_t>(spec.classes), 0);
    for (int c : sample.labels) ++counts[static_cast<std::size_t>(c)];
    if (*std::min_element(counts.begin(), counts.end()) >= 2) {
      out.dataset = std::move(sample);
      return out;
    }
  }
  throw Error(ErrorKind::Parameter, "could not draw a sample with every class represented twice");
}

}  // namespace hiht
