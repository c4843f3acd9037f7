#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hiht/data.hpp"

namespace hiht {

struct SyntheticSpec {
  int features = 50;
  int samples = 150;
  int classes = 3;
  int support_size = 3;
  double noise_sigma = 0.1;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  Dataset dataset;
  std::vector<std::size_t> support;  // planted rows, ascending
  Matrix true_weights;               // d x C, exactly support_size nonzero rows
};

/**
 * Standard-normal features; labels are the argmax of the planted class scores
 * Wᵀx plus N(0, sigma^2) noise. Each planted row is a random direction with
 * its class-mean removed (a constant shift across classes never changes the
 * argmax) and unit norm. Samples are redrawn, with the same weights, until
 * every class has at least two members.
 */
SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Fresh labelled samples from the same model.
Dataset sample_from_model(const Matrix& true_weights, double noise_sigma, int samples, std::mt19937_64& rng);

// argmax of Wᵀx per column, ties to the smallest class.
std::vector<int> bayes_predict(const Matrix& true_weights, const Matrix& features);

}  // namespace hiht
