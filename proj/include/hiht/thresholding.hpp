#pragma once

#include "hiht/objective.hpp"

namespace hiht {

// W - (1/L) grad
Matrix gradient_step(const WeightMatrix& weights, const Matrix& grad, double lipschitz);

// Keeps row i unchanged iff ||g_i||^2 > 2 lambda / L, otherwise writes an exact
// zero row. Ties go to zero. Non-finite input is rejected.
WeightMatrix row_hard_threshold(const Matrix& step, double lambda, double lipschitz);

// One IHT update: hard threshold of a gradient step.
WeightMatrix iht_update(const WeightMatrix& weights, double lambda, double lipschitz, const CenteredData& data);
WeightMatrix iht_update(const WeightMatrix& weights, const Matrix& grad, double lambda, double lipschitz);

}  // namespace hiht
