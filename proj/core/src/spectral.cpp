#include "noncollapse/spectral.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "noncollapse/error.hpp"

namespace noncollapse {
namespace {

using std::numbers::pi;

// Periodic Fourier differentiation on m points (m even).
void periodic_matrices(int m, Eigen::MatrixXd& d1, Eigen::MatrixXd& d2) {
  const double h = 2 * pi / m;
  d1.setZero(m, m);
  d2.setZero(m, m);
  for (int j = 0; j < m; ++j) {
    for (int l = 0; l < m; ++l) {
      if (j == l) {
        d2(j, l) = -pi * pi / (3 * h * h) - 1.0 / 6.0;
        continue;
      }
      const double sign = ((j - l) % 2 == 0) ? 1.0 : -1.0;
      const double half = 0.5 * (j - l) * h;
      d1(j, l) = 0.5 * sign / std::tan(half);
      const double s = std::sin(half);
      d2(j, l) = -0.5 * sign / (s * s);
    }
  }
}

}  // namespace

const char* to_string(BodyMode mode) { return mode == BodyMode::Curve ? "curve" : "axisymmetric"; }

BodyMode parse_body_mode(const char* s) {
  const std::string v(s);
  if (v == "curve") return BodyMode::Curve;
  if (v == "axisymmetric") return BodyMode::Axisymmetric;
  throw ConfigError("unknown body mode '" + v + "'");
}

SpectralGrid::SpectralGrid(BodyMode mode, int n) : mode_(mode), n_(n) {
  if (mode == BodyMode::Curve) {
    if (n < 8 || n % 2 != 0) throw ConfigError("curve grids need an even N >= 8");
    spacing_ = 2 * pi / n;
    theta_ = Eigen::VectorXd::LinSpaced(n, 0.0, spacing_ * (n - 1));
    periodic_matrices(n, d1_, d2_);
    analysis_.setZero(n, n);
    const int half = n / 2;
    for (int j = 0; j < n; ++j) {
      analysis_(0, j) = 1.0 / n;
      for (int k = 1; k < half; ++k) {
        // reduce the phase exactly before taking the cosine
        const double phase = 2 * pi * static_cast<double>((static_cast<long>(k) * j) % n) / n;
        analysis_(2 * k - 1, j) = 2.0 / n * std::cos(phase);
        analysis_(2 * k, j) = 2.0 / n * std::sin(phase);
      }
      analysis_(n - 1, j) = (j % 2 == 0 ? 1.0 : -1.0) / n;
    }
  } else {
    if (n < 5) throw ConfigError("axisymmetric grids need N >= 5");
    const int m = n - 1;
    spacing_ = pi / m;
    theta_ = Eigen::VectorXd::LinSpaced(n, 0.0, pi);
    Eigen::MatrixXd p1, p2;
    periodic_matrices(2 * m, p1, p2);
    d1_.setZero(n, n);
    d2_.setZero(n, n);
    for (int j = 0; j < n; ++j) {
      for (int l = 0; l < n; ++l) {
        d1_(j, l) = p1(j, l);
        d2_(j, l) = p2(j, l);
        if (l > 0 && l < m) {
          d1_(j, l) += p1(j, 2 * m - l);
          d2_(j, l) += p2(j, 2 * m - l);
        }
      }
    }
    // the even extension makes h' vanish exactly at the poles
    d1_.row(0).setZero();
    d1_.row(m).setZero();
    analysis_.setZero(n, n);
    for (int k = 0; k <= m; ++k) {
      for (int j = 0; j <= m; ++j) {
        const double w = (j == 0 || j == m) ? 0.5 : 1.0;
        const double phase = pi * static_cast<double>((static_cast<long>(k) * j) % (2 * m)) / m;
        analysis_(k, j) = 2.0 / m * w * std::cos(phase);
      }
      if (k == 0 || k == m) analysis_.row(k) *= 0.5;
    }
  }
  // constants differentiate to zero exactly (up to the row sum's rounding)
  for (int j = 0; j < n; ++j) {
    d1_(j, j) = 0.0;
    d2_(j, j) = 0.0;
    d1_(j, j) = -d1_.row(j).sum();
    d2_(j, j) = -d2_.row(j).sum();
  }
  stack_.resize(2 * n, n);
  stack_.topRows(n) = d1_;
  stack_.bottomRows(n) = d2_;
}

std::shared_ptr<const SpectralGrid> SpectralGrid::get(BodyMode mode, int n) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const SpectralGrid>> cache;
  const std::lock_guard lock(mu);
  auto& slot = cache[{static_cast<int>(mode), n}];
  if (!slot) slot = std::make_shared<const SpectralGrid>(mode, n);
  return slot;
}

Eigen::VectorXd SpectralGrid::coefficients(const Eigen::VectorXd& values) const {
  if (values.size() != n_) throw DomainError("coefficients: wrong number of samples");
  return analysis_ * values;
}

SpectralGrid::Sample SpectralGrid::evaluate(const Eigen::VectorXd& c, double theta) const {
  Sample s;
  const double c1 = std::cos(theta);
  const double s1 = std::sin(theta);
  double ck = 1.0;  // cos(k theta), sin(k theta) by rotation
  double sk = 0.0;
  if (mode_ == BodyMode::Curve) {
    const int half = n_ / 2;
    s.h = c(0);
    for (int k = 1; k <= half; ++k) {
      const double next_c = ck * c1 - sk * s1;
      sk = sk * c1 + ck * s1;
      ck = next_c;
      const double a = (k < half) ? c(2 * k - 1) : c(n_ - 1);
      const double b = (k < half) ? c(2 * k) : 0.0;
      s.h += a * ck + b * sk;
      s.dh += k * (-a * sk + b * ck);
      s.ddh -= static_cast<double>(k) * k * (a * ck + b * sk);
    }
  } else {
    s.h = c(0);
    for (int k = 1; k < n_; ++k) {
      const double next_c = ck * c1 - sk * s1;
      sk = sk * c1 + ck * s1;
      ck = next_c;
      s.h += c(k) * ck;
      s.dh -= k * c(k) * sk;
      s.ddh -= static_cast<double>(k) * k * c(k) * ck;
    }
  }
  return s;
}

}  // namespace noncollapse
