#include "noncollapse/speed.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <vector>

#include "noncollapse/error.hpp"
#include "noncollapse/parallel.hpp"
#include "noncollapse/random.hpp"

namespace noncollapse {
namespace {

using Buffer = std::array<double, SpeedFunction::kMaxDimension + 1>;

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// e[0..n] = elementary symmetric polynomials of z with entries skip1/skip2 removed.
void elementary(std::span<const double> z, int skip1, int skip2, Buffer& e) {
  const int n = static_cast<int>(z.size());
  std::fill(e.begin(), e.begin() + n + 1, 0.0);
  e[0] = 1;
  int len = 0;
  for (int i = 0; i < n; ++i) {
    if (i == skip1 || i == skip2) continue;
    ++len;
    for (int m = len; m >= 1; --m) e[m] += z[i] * e[m - 1];
  }
}

double at(const Buffer& e, int m) { return m < 0 ? 0.0 : e[m]; }

struct SigmaJet {
  double s = 0;
  Vec d;
  Mat dd;
};

// sigma_m and its derivatives: d_i = sigma_{m-1}(z|i), dd_ij = sigma_{m-2}(z|ij).
SigmaJet sigma_jet(const Vec& z, int m, bool with_hessian) {
  const int n = static_cast<int>(z.size());
  std::span<const double> zs(z.data(), n);
  SigmaJet j;
  Buffer e;
  elementary(zs, -1, -1, e);
  j.s = at(e, m);
  j.d.resize(n);
  for (int i = 0; i < n; ++i) {
    elementary(zs, i, -1, e);
    j.d(i) = at(e, m - 1);
  }
  if (with_hessian) {
    j.dd = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int k = i + 1; k < n; ++k) {
        elementary(zs, i, k, e);
        j.dd(i, k) = j.dd(k, i) = at(e, m - 2);
      }
  }
  return j;
}

void power_mean_tail(double p, const Vec& z, SpeedFunction::Jet& out, bool with_hessian) {
  const int n = static_cast<int>(z.size());
  const double f = out.value;
  out.grad.resize(n);
  for (int i = 0; i < n; ++i) out.grad(i) = std::pow(f / z(i), 1.0 - p) / n;
  if (with_hessian) {
    out.hess = (1.0 - p) * (out.grad * out.grad.transpose() / f);
    for (int i = 0; i < n; ++i) out.hess(i, i) -= (1.0 - p) * out.grad(i) / z(i);
  }
}

double power_mean_value(double p, std::span<const double> z) {
  const auto n = static_cast<double>(z.size());
  if (p == 1.0) {
    double s = 0;
    for (double x : z) s += x;
    return s / n;
  }
  if (p == 0.0) {
    double s = 0;
    for (double x : z) s += std::log(x);
    return std::exp(s / n);
  }
  if (p == -1.0) {
    double s = 0;
    for (double x : z) s += 1.0 / x;
    return n / s;
  }
  // Scale by the entry that dominates the sum to avoid overflow.
  const double ref = p > 0 ? *std::max_element(z.begin(), z.end()) : *std::min_element(z.begin(), z.end());
  double s = 0;
  for (double x : z) s += std::pow(x / ref, p);
  return ref * std::pow(s / n, 1.0 / p);
}

std::string format_number(double x) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

}  // namespace

SpeedFunction::SpeedFunction(SpeedKind kind, int n, double p, int k) : kind_(kind), n_(n), p_(p), k_(k) {
  if (n < 1 || n > kMaxDimension) throw ConfigError("speed dimension out of range: " + std::to_string(n));
  switch (kind) {
    case SpeedKind::SigmaRatio:
      if (k < 1 || k > n) throw ConfigError("sigma-ratio order must satisfy 1 <= k <= n");
      c_ = binomial(n, k - 1) / binomial(n, k);
      break;
    case SpeedKind::SigmaRoot:
      if (k < 1 || k > n) throw ConfigError("sigma-root order must satisfy 1 <= k <= n");
      c_ = 1.0 / std::pow(binomial(n, k), 1.0 / k);
      break;
    case SpeedKind::PowerMean:
      if (!std::isfinite(p)) throw ConfigError("power-mean exponent must be finite");
      c_ = 1;
      break;
    default:
      c_ = 1;
  }
}

SpeedFunction SpeedFunction::arithmetic_mean(int n) { return {SpeedKind::ArithmeticMean, n, 1.0, 1}; }
SpeedFunction SpeedFunction::power_mean(int n, double p) { return {SpeedKind::PowerMean, n, p, 1}; }
SpeedFunction SpeedFunction::sigma_ratio(int n, int k) { return {SpeedKind::SigmaRatio, n, 1.0, k}; }
SpeedFunction SpeedFunction::sigma_root(int n, int k) { return {SpeedKind::SigmaRoot, n, 1.0, k}; }
SpeedFunction SpeedFunction::harmonic_mean(int n) { return {SpeedKind::HarmonicMean, n, -1.0, 1}; }

SpeedFunction SpeedFunction::parse(std::string_view spec, int n) {
  const auto colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  auto need_arg = [&] {
    if (arg.empty()) throw ConfigError("speed '" + std::string(spec) + "' needs a parameter");
  };
  auto parse_int = [&]() {
    need_arg();
    int k = 0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), k);
    if (ec != std::errc{} || ptr != arg.data() + arg.size())
      throw ConfigError("bad integer parameter in speed '" + std::string(spec) + "'");
    return k;
  };
  if (head == "mean" && arg.empty()) return arithmetic_mean(n);
  if (head == "harmonic" && arg.empty()) return harmonic_mean(n);
  if (head == "power") {
    need_arg();
    double p = 0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), p);
    if (ec != std::errc{} || ptr != arg.data() + arg.size())
      throw ConfigError("bad exponent in speed '" + std::string(spec) + "'");
    return power_mean(n, p);
  }
  if (head == "sigma-ratio") return sigma_ratio(n, parse_int());
  if (head == "sigma-root") return sigma_root(n, parse_int());
  throw ConfigError("unknown speed '" + std::string(spec) + "'");
}

std::string SpeedFunction::name() const {
  switch (kind_) {
    case SpeedKind::ArithmeticMean:
      return "mean";
    case SpeedKind::HarmonicMean:
      return "harmonic";
    case SpeedKind::PowerMean:
      return "power:" + format_number(p_);
    case SpeedKind::SigmaRatio:
      return "sigma-ratio:" + std::to_string(k_);
    case SpeedKind::SigmaRoot:
      return "sigma-root:" + std::to_string(k_);
  }
  return "?";
}

SpeedFunction SpeedFunction::with_dimension(int n) const { return {kind_, n, p_, k_}; }

double SpeedFunction::value(std::span<const double> z) const {
  switch (kind_) {
    case SpeedKind::ArithmeticMean:
      return power_mean_value(1.0, z);
    case SpeedKind::HarmonicMean:
      return power_mean_value(-1.0, z);
    case SpeedKind::PowerMean:
      return power_mean_value(p_, z);
    case SpeedKind::SigmaRatio: {
      Buffer e;
      elementary(z, -1, -1, e);
      return c_ * e[k_] / e[k_ - 1];
    }
    case SpeedKind::SigmaRoot: {
      Buffer e;
      elementary(z, -1, -1, e);
      return c_ * std::pow(e[k_], 1.0 / k_);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

SpeedFunction::Jet SpeedFunction::jet(const Vec& z, bool with_hessian) const {
  require_positive_cone(z);
  if (z.size() != n_)
    throw DomainError("speed of dimension " + std::to_string(n_) + " evaluated at a " +
                      std::to_string(z.size()) + "-vector");
  Jet out;
  out.value = value(std::span<const double>(z.data(), n_));
  switch (kind_) {
    case SpeedKind::ArithmeticMean:
      out.grad = Vec::Constant(n_, 1.0 / n_);
      if (with_hessian) out.hess = Mat::Zero(n_, n_);
      break;
    case SpeedKind::HarmonicMean:
      power_mean_tail(-1.0, z, out, with_hessian);
      break;
    case SpeedKind::PowerMean:
      power_mean_tail(p_, z, out, with_hessian);
      break;
    case SpeedKind::SigmaRatio: {
      const SigmaJet top = sigma_jet(z, k_, with_hessian);
      const SigmaJet bot = sigma_jet(z, k_ - 1, with_hessian);
      const double q = bot.s;
      out.grad = c_ * (top.d / q - top.s * bot.d / (q * q));
      if (with_hessian) {
        Mat h = top.dd / q - (top.d * bot.d.transpose() + bot.d * top.d.transpose()) / (q * q) -
                top.s * bot.dd / (q * q) + 2.0 * top.s * (bot.d * bot.d.transpose()) / (q * q * q);
        out.hess = c_ * h;
      }
      break;
    }
    case SpeedKind::SigmaRoot: {
      const SigmaJet s = sigma_jet(z, k_, with_hessian);
      const double f = out.value;
      out.grad = f * s.d / (k_ * s.s);
      if (with_hessian) {
        out.hess = (f / k_) * ((1.0 / k_ - 1.0) * (s.d * s.d.transpose()) / (s.s * s.s) + s.dd / s.s);
      }
      break;
    }
  }
  return out;
}

void require_positive_cone(const Vec& z) {
  for (Eigen::Index i = 0; i < z.size(); ++i)
    if (!(z(i) > 0) || !std::isfinite(z(i)))
      throw DomainError("point outside the positive cone (entry " + std::to_string(i) + " = " +
                        format_number(z(i)) + ")");
}

double eval(const SpeedFunction& f, const Vec& z) {
  require_positive_cone(z);
  return f.jet(z, false).value;
}
Vec grad(const SpeedFunction& f, const Vec& z) { return f.jet(z, false).grad; }
Mat hess(const SpeedFunction& f, const Vec& z) { return f.jet(z, true).hess; }
double trace_grad(const SpeedFunction& f, const Vec& z) { return f.jet(z, false).grad.sum(); }

double DualSpeed::eval(const Vec& y) const {
  require_positive_cone(y);
  return 1.0 / base_.jet(y.cwiseInverse(), false).value;
}

Vec DualSpeed::grad(const Vec& y) const {
  require_positive_cone(y);
  const Vec z = y.cwiseInverse();
  const auto j = base_.jet(z, false);
  return j.grad.cwiseProduct(z.cwiseAbs2()) / (j.value * j.value);
}

Mat DualSpeed::hess(const Vec& y) const {
  require_positive_cone(y);
  const Vec z = y.cwiseInverse();
  const auto j = base_.jet(z, true);
  const double f = j.value;
  const Vec z2 = z.cwiseAbs2();
  const Vec w = j.grad.cwiseProduct(z2);  // f-dot^i z_i^2
  Mat h = -(z2.asDiagonal() * j.hess * z2.asDiagonal()) / (f * f) + 2.0 * (w * w.transpose()) / (f * f * f);
  for (Eigen::Index i = 0; i < z.size(); ++i) h(i, i) -= 2.0 * j.grad(i) * z2(i) * z(i) / (f * f);
  return h;
}

double DualSpeed::dual_eval(const Vec& z) const { return 1.0 / eval(z.cwiseInverse()); }

double dual_eval(const SpeedFunction& f, const Vec& y) { return DualSpeed(f).eval(y); }

MatrixJet matrix_eval(const SpeedFunction& f, const Mat& a) {
  const Mat sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(sym);
  if (es.info() != Eigen::Success) throw NotPositiveDefinite("eigen-decomposition failed");
  if (!(es.eigenvalues()(0) > 0))
    throw NotPositiveDefinite("matrix is not positive definite (min eigenvalue " +
                              format_number(es.eigenvalues()(0)) + ")");
  MatrixJet out;
  out.eigenvalues = es.eigenvalues();
  out.eigenvectors = es.eigenvectors();
  const auto j = f.jet(out.eigenvalues, false);
  out.value = j.value;
  out.gradient = out.eigenvectors * j.grad.asDiagonal() * out.eigenvectors.transpose();
  return out;
}

double divided_difference(const Vec& g, const Mat& h, const Vec& lambda, int p, int q) {
  const double gap = lambda(p) - lambda(q);
  if (std::abs(gap) < divided_difference_gap(lambda(p))) return h(p, p) - h(p, q);
  return (g(p) - g(q)) / gap;
}

double matrix_hess_form(const SpeedFunction& f, const Vec& lambda, const Mat& b) {
  const auto j = f.jet(lambda, true);
  const int n = static_cast<int>(lambda.size());
  const Vec diag = b.diagonal();
  double total = diag.dot(j.hess * diag);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (p != q) total += divided_difference(j.grad, j.hess, lambda, p, q) * b(p, q) * b(p, q);
  return total;
}

double matrix_hess_form_ambient(const SpeedFunction& f, const Mat& a, const Mat& b) {
  const MatrixJet m = matrix_eval(f, a);
  const Mat rotated = m.eigenvectors.transpose() * b * m.eigenvectors;
  return matrix_hess_form(f, m.eigenvalues, rotated);
}

std::string to_string(Property p) {
  switch (p) {
    case Property::Concave:
      return "concave";
    case Property::InverseConcave:
      return "inverse-concave";
    case Property::Monotone:
      return "monotone";
    case Property::Homogeneous:
      return "homogeneous";
  }
  return "?";
}

Property parse_property(std::string_view s) {
  if (s == "concave") return Property::Concave;
  if (s == "inverse-concave") return Property::InverseConcave;
  if (s == "monotone") return Property::Monotone;
  if (s == "homogeneous") return Property::Homogeneous;
  throw ConfigError("unknown property '" + std::string(s) + "'");
}

Vec certification_point(int n, std::uint64_t seed, std::uint64_t trial) {
  if (trial == 0) return Vec::Ones(n);
  Rng rng = trial_rng(seed, trial);
  Vec z = log_uniform_vector(rng, n, 1e-3, 1e3);
  if (n >= 2 && trial % 4 == 3) {
    // near-degenerate ray: two coordinates within 1e-6 of each other
    const int i = static_cast<int>(rng() % static_cast<std::uint64_t>(n));
    int j = static_cast<int>(rng() % static_cast<std::uint64_t>(n - 1));
    if (j >= i) ++j;
    z(j) = z(i) * (1.0 + uniform(rng, -1e-6, 1e-6));
  }
  return z;
}

namespace {

double psd_slack(const Mat& m) { return 1e-8 * (1.0 + m.cwiseAbs().maxCoeff()); }

double min_eigen(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double max_eigen(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(m.rows() - 1);
}

struct TrialResult {
  double eigen = std::numeric_limits<double>::infinity();  // worst (smallest) signed margin
  double score = std::numeric_limits<double>::infinity();  // eigen normalised by slack
  std::string check;
};

// Largest term in the chain-rule assembly of the dual Hessian; the assembled
// matrix can be far smaller (it vanishes for the harmonic mean).
double dual_hess_terms(const SpeedFunction& f, const Vec& y) {
  const Vec z = y.cwiseInverse();
  const auto j = f.jet(z, true);
  const Vec z2 = z.cwiseAbs2();
  const Vec w = j.grad.cwiseProduct(z2);
  const double fv = j.value;
  const double t1 = (z2.asDiagonal() * j.hess * z2.asDiagonal()).cwiseAbs().maxCoeff() / (fv * fv);
  const double t2 = 2.0 * w.cwiseAbs2().maxCoeff() / (fv * fv * fv);
  const double t3 = 2.0 * j.grad.cwiseProduct(z2).cwiseProduct(z).cwiseAbs().maxCoeff() / (fv * fv);
  return std::max({t1, t2, t3});
}

TrialResult run_trial(const SpeedFunction& f, Property property, const Vec& z, std::uint64_t seed,
                      std::uint64_t trial) {
  TrialResult r;
  auto consider = [&](double eigen, double slack, const char* check) {
    const double score = eigen / slack;
    if (score < r.score) {
      r.score = score;
      r.eigen = eigen;
      r.check = check;
    }
  };
  switch (property) {
    case Property::Concave: {
      // concave: -f-ddot is positive semi-definite
      const Mat h = hess(f, z);
      consider(-max_eigen(h), psd_slack(h), "hessian");
      break;
    }
    case Property::InverseConcave: {
      const auto j = f.jet(z, true);
      Mat m = j.hess;
      for (Eigen::Index i = 0; i < z.size(); ++i) m(i, i) += 2.0 * j.grad(i) / z(i);
      consider(min_eigen(m), psd_slack(m), "hessian+2diag(grad/z)");
      const Mat dh = DualSpeed(f).hess(z);  // z doubles as a dual point y
      consider(-max_eigen(dh), 1e-8 * (1.0 + dual_hess_terms(f, z)), "dual-hessian");
      break;
    }
    case Property::Monotone: {
      const Vec g = grad(f, z);
      consider(g.minCoeff(), 1e-300, "gradient");
      break;
    }
    case Property::Homogeneous: {
      Rng rng = trial_rng(seed ^ 0x5bd1e995ULL, trial);
      const double t = log_uniform(rng, 1e-3, 1e3);
      const double fz = eval(f, z);
      const double residual = std::abs(eval(f, Vec(t * z)) - t * fz) / (t * fz);
      consider(-residual, 1e-9, "homogeneity");
      break;
    }
  }
  return r;
}

}  // namespace

CertReport certify(const SpeedFunction& f, Property property, std::size_t trials, std::uint64_t seed) {
  if (trials < 1) throw ConfigError("certify needs at least one trial");
  const int n = f.dimension();
  std::vector<TrialResult> results(trials);
  parallel_for(trials, [&](std::size_t i) {
    results[i] = run_trial(f, property, certification_point(n, seed, i), seed, i);
  });
  std::size_t worst = 0;
  for (std::size_t i = 1; i < trials; ++i)
    if (results[i].score < results[worst].score) worst = i;

  CertReport report;
  report.property = property;
  report.samples_tested = trials;
  report.min_eigen_seen = results[worst].eigen;
  // score < -1 means the margin is more negative than its slack
  report.certified = !(results[worst].score < -1.0);
  if (!report.certified) {
    report.witness = CertWitness{certification_point(n, seed, worst), results[worst].eigen, results[worst].check};
  }
  return report;
}

}  // namespace noncollapse
