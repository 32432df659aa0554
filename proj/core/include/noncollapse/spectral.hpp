#pragma once

#include <memory>

#include <Eigen/Dense>

namespace noncollapse {

enum class BodyMode { Curve, Axisymmetric };

const char* to_string(BodyMode mode);
BodyMode parse_body_mode(const char* s);

/// Collocation grid with spectral differentiation.
///
/// Curve:        theta_j = 2 pi j / N, j < N (N even), trigonometric interpolant.
/// Axisymmetric: theta_j = pi j / (N - 1), j < N, cosine series (the even
///               extension to a 2(N-1)-periodic grid), so h'(0) = h'(pi) = 0.
///
/// Grids are immutable and shared: get() caches one instance per (mode, N).
class SpectralGrid {
 public:
  static std::shared_ptr<const SpectralGrid> get(BodyMode mode, int n);

  BodyMode mode() const noexcept { return mode_; }
  int size() const noexcept { return n_; }
  double spacing() const noexcept { return spacing_; }
  const Eigen::VectorXd& theta() const noexcept { return theta_; }

  /// [D1; D2] stacked, so one product yields both derivatives.
  const Eigen::MatrixXd& derivative_stack() const noexcept { return stack_; }
  const Eigen::MatrixXd& d1() const noexcept { return d1_; }
  const Eigen::MatrixXd& d2() const noexcept { return d2_; }

  /// Interpolant coefficients. Curve: [a_0, a_1, b_1, ..., a_{N/2-1}, b_{N/2-1}, a_{N/2}];
  /// Axisymmetric: c_0 .. c_{N-1} for cos(k theta).
  Eigen::VectorXd coefficients(const Eigen::VectorXd& values) const;

  struct Sample {
    double h = 0;
    double dh = 0;
    double ddh = 0;
  };
  /// Interpolant and its first two derivatives at an arbitrary angle.
  Sample evaluate(const Eigen::VectorXd& coefficients, double theta) const;

  SpectralGrid(BodyMode mode, int n);

 private:
  BodyMode mode_;
  int n_;
  double spacing_;
  Eigen::VectorXd theta_;
  Eigen::MatrixXd d1_, d2_, stack_, analysis_;
};

}  // namespace noncollapse
