#pragma once

#include <cstdint>
#include <vector>

#include "hiht/objective.hpp"

namespace hiht {

struct OracleSolution {
  WeightMatrix weights;
  double objective = 0.0;
  std::vector<std::size_t> support;
};

/**
 * Exhaustive row-support enumeration for the centered l2,0 problem. Every one
 * of the 2^d supports is fitted by restricted least squares (normal
 * equations with a 1e-10 ridge) once; queries for any lambda then reduce to
 * a scan over the stored losses.
 */
class SupportEnumeration {
 public:
  explicit SupportEnumeration(const CenteredData& data, int max_features = 12);

  OracleSolution solve(double lambda) const;
  // Minimum restricted loss over supports of exactly k rows.
  double best_loss_of_size(std::size_t k) const;
  std::size_t support_count() const { return losses_.size(); }

 private:
  WeightMatrix fit(std::uint32_t mask) const;

  const CenteredData* data_;
  std::vector<double> losses_;  // indexed by support bitmask
};

// Convenience wrapper: enumerates and solves for one lambda.
OracleSolution brute_force_oracle(const CenteredData& data, double lambda, int max_features = 12);

}  // namespace hiht
