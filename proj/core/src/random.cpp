#include "noncollapse/random.hpp"

#include <cmath>

namespace noncollapse {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t trial) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (trial + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform(Rng& rng, double lo, double hi) {
  // 53 random bits; avoids implementation-defined distribution objects.
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

double log_uniform(Rng& rng, double lo, double hi) {
  return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

double standard_normal(Rng& rng) {
  // Box-Muller; u1 is kept away from zero.
  const double u1 = uniform(rng, 0x1.0p-53, 1.0);
  const double u2 = uniform(rng, 0.0, 1.0);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

Eigen::VectorXd log_uniform_vector(Rng& rng, int n, double lo, double hi) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = log_uniform(rng, lo, hi);
  return v;
}

Eigen::MatrixXd random_orthogonal(Rng& rng, int n) {
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = standard_normal(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

Eigen::MatrixXd random_symmetric(Rng& rng, int n) {
  Eigen::MatrixXd s(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) s(i, j) = s(j, i) = standard_normal(rng);
  return s;
}

}  // namespace noncollapse
