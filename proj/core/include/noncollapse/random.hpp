#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace noncollapse {

using Rng = std::mt19937_64;

/// Deterministic per-trial seed derived from (seed, trial) by splitmix64.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t trial);

inline Rng trial_rng(std::uint64_t seed, std::uint64_t trial) {
  return Rng(derive_seed(seed, trial));
}

double uniform(Rng& rng, double lo, double hi);
double log_uniform(Rng& rng, double lo, double hi);
double standard_normal(Rng& rng);

/// Vector with entries log-uniform in [lo, hi].
Eigen::VectorXd log_uniform_vector(Rng& rng, int n, double lo, double hi);

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix, sign-fixed).
Eigen::MatrixXd random_orthogonal(Rng& rng, int n);

/// Symmetric matrix with standard normal entries.
Eigen::MatrixXd random_symmetric(Rng& rng, int n);

}  // namespace noncollapse
