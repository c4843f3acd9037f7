#pragma once

#include <cstdint>
#include <vector>

#include "hiht/data.hpp"

namespace hiht {

// d x C; a feature is selected iff its row is not exactly zero.
using WeightMatrix = Matrix;
using BiasVector = Vector;

// f(W) = 1/2 ||W^T Xc - Yc||_F^2
double loss(const WeightMatrix& weights, const CenteredData& data);

// X̃ (X̃ᵀ W - Ỹᵀ); never forms the d x d Gram matrix.
Matrix gradient(const WeightMatrix& weights, const CenteredData& data);

// loss(W) + lambda * (number of nonzero rows of W)
double objective_value(const WeightMatrix& weights, double lambda, const CenteredData& data);

// Exact-zero row test. Rows written by the hard threshold are literal zeros.
std::size_t support_size(const WeightMatrix& weights);
std::vector<std::size_t> support(const WeightMatrix& weights);

/// b = (1/N)(Y - WᵀX)1, the minimiser over b of the uncentered objective.
BiasVector recover_bias(const WeightMatrix& weights, const Dataset& dataset, const LabelMatrix& labels);
BiasVector recover_bias(const WeightMatrix& weights, const Matrix& features, const Matrix& targets);

// 1/2 ||WᵀX + b1ᵀ - Y||_F^2 + lambda ||W||_{2,0} on raw (uncentered) data.
double uncentered_objective(const WeightMatrix& weights, const BiasVector& bias, double lambda,
                            const Matrix& features, const Matrix& targets);

struct SpectralOptions {
  double tolerance = 1e-6;
  int max_iterations = 500;
  std::uint64_t seed = 0;
};

/**
 * Upper estimate of the Lipschitz constant of the loss gradient, i.e. the
 * largest eigenvalue of X̃X̃ᵀ. Power iteration approaches the eigenvalue from
 * below, so the Rayleigh estimate is inflated by 1%. All-zero data returns
 * the 1e-12 floor.
 */
double spectral_bound(const CenteredData& data, const SpectralOptions& options = {});

Vector row_norms(const Matrix& weights);

// Throws Shape unless W is d x C for the given data.
void check_weight_shape(const WeightMatrix& weights, const CenteredData& data);

}  // namespace hiht
