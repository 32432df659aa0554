#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace noncollapse {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class SpeedKind { ArithmeticMean, PowerMean, SigmaRatio, SigmaRoot, HarmonicMean };

/// A symmetric, degree-one homogeneous, monotone function on the positive cone,
/// normalised so that f(1,...,1) = 1.
///
/// Built-ins:
///   mean          (z_1 + ... + z_n) / n
///   power:p       ((z_1^p + ... + z_n^p) / n)^(1/p), geometric mean at p = 0
///   sigma-ratio:k c * sigma_k / sigma_{k-1}
///   sigma-root:k  (sigma_k / binom(n, k))^(1/k)
///   harmonic      n / (1/z_1 + ... + 1/z_n)
///
/// Elementary symmetric polynomials are accumulated by the product recursion
/// e_m <- e_m + x e_{m-1}; on the positive cone every term is positive, so
/// values and derivatives carry no cancellation.
class SpeedFunction {
 public:
  static constexpr int kMaxDimension = 64;

  static SpeedFunction arithmetic_mean(int n);
  static SpeedFunction power_mean(int n, double p);
  static SpeedFunction sigma_ratio(int n, int k);
  static SpeedFunction sigma_root(int n, int k);
  static SpeedFunction harmonic_mean(int n);

  /// Parses "mean", "power:<p>", "sigma-ratio:<k>", "sigma-root:<k>", "harmonic".
  static SpeedFunction parse(std::string_view spec, int n);

  SpeedKind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return n_; }
  double exponent() const noexcept { return p_; }
  int order() const noexcept { return k_; }
  /// Scalar c with c * f_raw(1,...,1) = 1.
  double normalization() const noexcept { return c_; }

  /// Canonical spec string; parse(name(), n) reproduces *this.
  std::string name() const;

  /// Same family and parameters in another dimension.
  SpeedFunction with_dimension(int n) const;

  /// Allocation-free value; used on the flow's hot path.
  double value(std::span<const double> z) const;

  struct Jet {
    double value = 0;
    Vec grad;
    Mat hess;
  };
  /// Value, gradient and (optionally) Hessian at z.
  Jet jet(const Vec& z, bool with_hessian = true) const;

  bool operator==(const SpeedFunction&) const = default;

 private:
  SpeedFunction(SpeedKind kind, int n, double p, int k);

  SpeedKind kind_;
  int n_;
  double p_ = 1;  // power-mean exponent
  int k_ = 1;     // sigma order
  double c_ = 1;
};

/// Throws DomainError unless every entry is finite and > 0.
void require_positive_cone(const Vec& z);

double eval(const SpeedFunction& f, const Vec& z);
Vec grad(const SpeedFunction& f, const Vec& z);
Mat hess(const SpeedFunction& f, const Vec& z);
/// Sum of the gradient entries, i.e. tr(F-dot) at any A with spectrum z.
double trace_grad(const SpeedFunction& f, const Vec& z);

/// The dual f*(y) = 1 / f(1/y_1, ..., 1/y_n); f is inverse-concave iff f* is concave.
class DualSpeed {
 public:
  explicit DualSpeed(SpeedFunction base) : base_(std::move(base)) {}
  const SpeedFunction& base() const noexcept { return base_; }

  double eval(const Vec& y) const;
  Vec grad(const Vec& y) const;
  Mat hess(const Vec& y) const;
  /// (f*)*(z) = 1 / f*(1/z); equals f(z) (duality is an involution).
  double dual_eval(const Vec& z) const;

 private:
  SpeedFunction base_;
};

double dual_eval(const SpeedFunction& f, const Vec& y);

/// F(A) = f(lambda(A)) together with its gradient and the eigen-data used.
struct MatrixJet {
  double value = 0;
  Mat gradient;     // V diag(f-dot(lambda)) V^T
  Vec eigenvalues;  // ascending
  Mat eigenvectors;
};

/// Throws NotPositiveDefinite when min eigenvalue <= 0.
MatrixJet matrix_eval(const SpeedFunction& f, const Mat& a);

/// Relative gap below which divided differences switch to their limit.
inline double divided_difference_gap(double lambda_p) { return 1e-7 * (1.0 + std::abs(lambda_p)); }

/// (f-dot^p - f-dot^q) / (lambda_p - lambda_q), with the analytic limit
/// f-ddot^pp - f-ddot^pq when the eigenvalues (nearly) coincide.
double divided_difference(const Vec& grad, const Mat& hess, const Vec& lambda, int p, int q);

/// Second derivative of F at diag(lambda) in direction B (B in the eigenbasis):
///   f-ddot^{pq} B_pp B_qq + sum_{p != q} (f-dot^p - f-dot^q)/(lambda_p - lambda_q) B_pq^2.
double matrix_hess_form(const SpeedFunction& f, const Vec& lambda, const Mat& b_eigenbasis);
/// Same quadratic form with A and B both in ambient coordinates.
double matrix_hess_form_ambient(const SpeedFunction& f, const Mat& a, const Mat& b);

enum class Property { Concave, InverseConcave, Monotone, Homogeneous };
std::string to_string(Property p);
Property parse_property(std::string_view s);

struct CertWitness {
  Vec point;
  double violation = 0;  // violating eigenvalue (or residual)
  std::string check;     // which test failed
};

struct CertReport {
  Property property = Property::Concave;
  std::size_t samples_tested = 0;
  /// Smallest eigenvalue seen of the matrix that must be positive
  /// semi-definite: -f-ddot (concave), f-ddot + 2 diag(f-dot / z) or -(f*)-ddot
  /// (inverse-concave).
  double min_eigen_seen = 0;
  bool certified = false;
  std::optional<CertWitness> witness;  // present iff refuted
};

/// Sampling-based certificate: log-uniform points in [1e-3, 1e3]^n plus rays
/// on which two coordinates agree to 1e-6. PSD checks use the slack
/// 1e-8 * (1 + max-norm).
CertReport certify(const SpeedFunction& f, Property property, std::size_t trials, std::uint64_t seed);

/// Sample point used by trial `trial` of certify (exposed for reproduction).
Vec certification_point(int n, std::uint64_t seed, std::uint64_t trial);

}  // namespace noncollapse
