#include "noncollapse/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "noncollapse/error.hpp"
#include "noncollapse/parallel.hpp"
#include "noncollapse/random.hpp"

namespace noncollapse {
namespace {

Mat shifted_inverse(const Mat& b, double k) {
  const int n = static_cast<int>(b.rows());
  const Mat shifted = b - k * Mat::Identity(n, n);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (shifted + shifted.transpose()));
  if (!(es.eigenvalues()(0) > 1e-12)) throw SingularShift("k is not strictly below the spectrum of B");
  return es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() * es.eigenvectors().transpose();
}

void require_shift_below(const Mat& a, double k, const char* which) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.transpose()), Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues()(0) - k > 1e-12))
    throw SingularShift(std::string("k is not strictly below the spectrum of ") + which);
}

void require_shift_below(const Vec& v, double k, const char* which) {
  if (!(v.minCoeff() - k > 1e-12)) throw SingularShift(std::string("k is not strictly below ") + which);
}

// A totally symmetric 3-tensor stored densely as n*n*n.
struct Tensor3 {
  int n;
  std::vector<double> data;
  explicit Tensor3(int n_) : n(n_), data(static_cast<std::size_t>(n_ * n_ * n_), 0.0) {}
  double& operator()(int i, int j, int k) { return data[static_cast<std::size_t>((i * n + j) * n + k)]; }
  double operator()(int i, int j, int k) const { return data[static_cast<std::size_t>((i * n + j) * n + k)]; }
};

}  // namespace

Mat optimal_lambda(const Mat& a, const Mat& b, double k) {
  require_shift_below(a, k, "A");
  const int n = static_cast<int>(a.rows());
  return (a - k * Mat::Identity(n, n)) * shifted_inverse(b, k);
}

double interior_bracket(const SpeedFunction& f, const Mat& a, const Mat& b, double k, const Mat& lambda) {
  const int n = static_cast<int>(a.rows());
  const Mat id = Mat::Identity(n, n);
  const Mat fdot = matrix_eval(f, a).gradient;
  const Mat x = (k * id - a) - 2.0 * lambda * (k * id - a) + lambda * (k * id - b) * lambda.transpose();
  return (fdot.array() * x.array()).sum();
}

double q_function(const SpeedFunction& f, const Vec& a, const Vec& z, double k) {
  require_shift_below(a, k, "a");
  require_shift_below(z, k, "z");
  const auto ja = f.jet(a, false);
  const double fz = eval(f, z);
  double lin = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double s = a(i) - k;
    lin += ja.grad(i) * (s - s * s / (z(i) - k));
  }
  return fz - ja.value - lin;
}

GapValue interior_gap(const SpeedFunction& f, const InteriorSample& s) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (s.a + s.a.transpose()), Eigen::EigenvaluesOnly);
  const Vec a = es.eigenvalues();
  const Vec b = s.b.diagonal();
  require_shift_below(a, s.k, "lambda(A)");
  require_shift_below(b, s.k, "lambda(B)");
  const auto ja = f.jet(a, false);
  const double fb = eval(f, b);
  double first = 0;
  double second = 0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double shift = a(i) - s.k;
    first += ja.grad(i) * shift;
    second += ja.grad(i) * shift * shift / (b(i) - s.k);
  }
  GapValue g;
  g.value = fb - ja.value - first + second;
  g.scale = 1.0 + std::max({std::abs(fb), std::abs(ja.value), std::abs(first), std::abs(second)});
  return g;
}

GapValue interior_gap_matrix(const SpeedFunction& f, const Mat& a, const Mat& b, double k) {
  require_shift_below(a, k, "A");
  const int n = static_cast<int>(a.rows());
  const Mat id = Mat::Identity(n, n);
  const MatrixJet ja = matrix_eval(f, a);
  const double fb = matrix_eval(f, b).value;
  const Mat shifted = a - k * id;
  const double first = (ja.gradient.array() * shifted.array()).sum();
  const Mat sandwich = shifted * shifted_inverse(b, k) * shifted;
  const double second = (ja.gradient.array() * sandwich.array()).sum();
  GapValue g;
  g.value = fb - ja.value - first + second;
  g.scale = 1.0 + std::max({std::abs(fb), std::abs(ja.value), std::abs(first), std::abs(second)});
  return g;
}

QSecondDerivative q_second_derivative_check(const SpeedFunction& f, const Vec& a, const Vec& z, double k) {
  require_shift_below(a, k, "a");
  require_shift_below(z, k, "z");
  const int n = static_cast<int>(a.size());
  const auto ja = f.jet(a, false);
  const auto jz = f.jet(z, true);

  // derivatives of q_a
  Vec qdot(n);
  Mat qddot = jz.hess;
  for (int i = 0; i < n; ++i) {
    const double sa = a(i) - k;
    const double sz = z(i) - k;
    qdot(i) = jz.grad(i) - ja.grad(i) * sa * sa / (sz * sz);
    qddot(i, i) += 2.0 * ja.grad(i) * sa * sa / (sz * sz * sz);
  }
  QSecondDerivative out;
  out.lhs = qddot;
  out.rhs = jz.hess;
  for (int i = 0; i < n; ++i) {
    out.lhs(i, i) += 2.0 * qdot(i) / (z(i) - k);
    out.rhs(i, i) += 2.0 * jz.grad(i) / (z(i) - k);
  }
  return out;
}

namespace {

Vec split_degenerate(const Vec& lambda, const Mat& b, bool perturb, bool& perturbed) {
  const int n = static_cast<int>(lambda.size());
  const double gap_tol = divided_difference_gap(lambda(0));
  bool degenerate = false;
  for (int q = 1; q < n; ++q) {
    if (lambda(q) - lambda(0) >= gap_tol) continue;
    for (int p = 0; p < n; ++p)
      if (b(p, q) != 0.0) degenerate = true;
  }
  perturbed = false;
  if (!degenerate) return lambda;
  if (!perturb) throw DegenerateSpectrum("bottom eigenvalue is degenerate and B couples to it");
  Vec out = lambda;
  for (int i = 1; i < n; ++i) out(i) += i * 10.0 * gap_tol;
  perturbed = true;
  return out;
}

void check_boundary_sample(const BoundarySample& s) {
  const auto n = s.lambda.size();
  if (s.b.rows() != n || s.b.cols() != n) throw DomainError("boundary sample: B has the wrong shape");
  if (s.b(0, 0) != 0.0) throw DomainError("boundary sample: B(0,0) must vanish");
  require_positive_cone(s.lambda);
  for (Eigen::Index i = 1; i < n; ++i)
    if (s.lambda(i) < s.lambda(0)) throw DomainError("boundary sample: lambda(0) must be the smallest eigenvalue");
}

}  // namespace

GapValue boundary_form(const SpeedFunction& f, const BoundarySample& s, BoundaryOptions opts) {
  check_boundary_sample(s);
  bool perturbed = false;
  const Vec lambda = split_degenerate(s.lambda, s.b, opts.perturb_degenerate, perturbed);
  const int n = static_cast<int>(lambda.size());
  const auto j = f.jet(lambda, true);
  const Vec diag = s.b.diagonal();
  const double hess_term = diag.dot(j.hess * diag);
  double divided = 0;
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      if (p != q) divided += divided_difference(j.grad, j.hess, lambda, p, q) * s.b(p, q) * s.b(p, q);
  double sup_term = 0;
  for (int p = 0; p < n; ++p)
    for (int q = 1; q < n; ++q) sup_term += 2.0 * j.grad(p) / (lambda(q) - lambda(0)) * s.b(p, q) * s.b(p, q);
  GapValue g;
  g.value = hess_term + divided + sup_term;
  g.scale = 1.0 + std::max({std::abs(hess_term), std::abs(divided), std::abs(sup_term)});
  g.perturbed = perturbed;
  return g;
}

double boundary_sup_closed_form(const SpeedFunction& f, const BoundarySample& s) {
  check_boundary_sample(s);
  bool perturbed = false;
  const Vec lambda = split_degenerate(s.lambda, s.b, true, perturbed);
  const int n = static_cast<int>(lambda.size());
  const Vec g = f.jet(lambda, false).grad;
  double sup_term = 0;
  for (int p = 0; p < n; ++p)
    for (int q = 1; q < n; ++q) sup_term += 2.0 * g(p) / (lambda(q) - lambda(0)) * s.b(p, q) * s.b(p, q);
  return sup_term;
}

double boundary_lambda_objective(const Mat& fdot, const Mat& a_shifted, const Mat& c, const Mat& lambda) {
  // 2 F-dot^{kl} [2 Lambda_k^p c_lp - Lambda_k^p Lambda_l^q M_pq]
  return 4.0 * (fdot * lambda * c.transpose()).trace() -
         2.0 * (fdot * lambda * a_shifted * lambda.transpose()).trace();
}

BruteForceBoundary brute_force_boundary(const SpeedFunction& f, const BoundarySample& s, int restarts,
                                        std::uint64_t seed) {
  check_boundary_sample(s);
  const int n = static_cast<int>(s.lambda.size());
  Rng rng = trial_rng(seed, 0xB0D1);
  const Mat u = random_orthogonal(rng, n);

  // Totally symmetric tensor in the eigenframe: slices through index 0 are B,
  // the block with no zero index is random.
  Tensor3 frame(n);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b)
      for (int c = b; c < n; ++c) {
        double v;
        if (a == 0)
          v = s.b(b, c);
        else
          v = standard_normal(rng);
        const int idx[3] = {a, b, c};
        const int perm[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        for (const auto& pm : perm) frame(idx[pm[0]], idx[pm[1]], idx[pm[2]]) = v;
      }
  Tensor3 t(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        double acc = 0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) acc += u(i, a) * u(j, b) * u(k, c) * frame(a, b, c);
        t(i, j, k) = acc;
      }

  const Mat a = u * s.lambda.asDiagonal() * u.transpose();
  const Vec y = u.col(0);
  const Mat fdot = matrix_eval(f, a).gradient;
  const double ayy = y.dot(a * y);
  const Mat m = a - ayy * Mat::Identity(n, n);

  // c_lp = y^i T_ilp - (y^r y^s T_lrs) y_p
  Mat c(n, n);
  for (int l = 0; l < n; ++l) {
    double tyy = 0;
    for (int r = 0; r < n; ++r)
      for (int q = 0; q < n; ++q) tyy += y(r) * y(q) * t(l, r, q);
    for (int p = 0; p < n; ++p) {
      double ty = 0;
      for (int i = 0; i < n; ++i) ty += y(i) * t(i, l, p);
      c(l, p) = ty - tyy * y(p);
    }
  }

  // Stationarity: F-dot Lambda M = F-dot C, i.e. (M kron F-dot) vec(Lambda) = vec(F-dot C).
  const int nn = n * n;
  Mat h(nn, nn);
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) h.block(q * n, p * n, n, n) = m(q, p) * fdot;
  const Mat rhs_mat = fdot * c;
  const Vec rhs = Eigen::Map<const Vec>(rhs_mat.data(), nn);
  const Vec x = h.completeOrthogonalDecomposition().solve(rhs);
  const Mat lambda_star = Eigen::Map<const Mat>(x.data(), n, n);

  BruteForceBoundary out;
  out.optimizer = lambda_star;
  out.stationary = boundary_lambda_objective(fdot, m, c, lambda_star);
  out.best_random = -std::numeric_limits<double>::infinity();
  const double scale = 1.0 + lambda_star.cwiseAbs().maxCoeff();
  for (int r = 0; r < restarts; ++r) {
    Mat probe(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) probe(i, j) = standard_normal(rng);
    // alternate between local perturbations and global probes
    const double eps = (r % 2 == 0) ? 1e-3 * scale : scale;
    out.best_random = std::max(out.best_random, boundary_lambda_objective(fdot, m, c, lambda_star + eps * probe));
  }
  out.value = std::max(out.stationary, out.best_random);
  return out;
}

OracleVerdict evaluate_interior(const SpeedFunction& f, const InteriorSample& s) {
  OracleVerdict v;
  const GapValue g = interior_gap(f, s);
  v.value = g.value;
  v.lower_bound_checked = -kOracleTolerance * g.scale;
  v.optimizer = optimal_lambda(s.a, s.b, s.k);
  return v;
}

OracleVerdict evaluate_boundary(const SpeedFunction& f, const BoundarySample& s, bool with_brute_force,
                                std::uint64_t seed) {
  OracleVerdict v;
  const GapValue g = boundary_form(f, s);
  v.value = g.value;
  v.lower_bound_checked = -kOracleTolerance * g.scale;
  const int n = static_cast<int>(s.lambda.size());
  v.optimizer = Mat::Zero(n, n);
  for (int l = 0; l < n; ++l)
    for (int q = 1; q < n; ++q) v.optimizer(l, q) = s.b(l, q) / (s.lambda(q) - s.lambda(0));
  if (with_brute_force) v.brute_force_value = brute_force_boundary(f, s, 64, seed).value;
  return v;
}

InteriorSample sample_interior(int n, std::uint64_t seed, std::uint64_t trial) {
  Rng rng = trial_rng(seed, trial);
  const Vec a = log_uniform_vector(rng, n, 1e-2, 1e2);
  const Vec b = log_uniform_vector(rng, n, 1e-2, 1e2);
  const Mat u = random_orthogonal(rng, n);
  const double floor = std::min(a.minCoeff(), b.minCoeff());
  InteriorSample s;
  s.a = u * a.asDiagonal() * u.transpose();
  s.a = (0.5 * (s.a + s.a.transpose())).eval();
  s.b = b.asDiagonal();
  s.k = uniform(rng, -1.0, 0.9 * floor);
  return s;
}

BoundarySample sample_boundary(int n, std::uint64_t seed, std::uint64_t trial) {
  Rng rng = trial_rng(seed, trial);
  Vec lambda = log_uniform_vector(rng, n, 1e-2, 1e2);
  std::sort(lambda.data(), lambda.data() + n);
  BoundarySample s;
  s.lambda = lambda;
  s.b = random_symmetric(rng, n);
  s.b(0, 0) = 0.0;
  return s;
}

SuiteResult run_suite(const std::string& proposition, const SpeedFunction& f, std::size_t trials,
                      std::uint64_t seed) {
  if (proposition != "2.2" && proposition != "2.5")
    throw ConfigError("unknown proposition '" + proposition + "' (expected 2.2 or 2.5)");
  if (trials < 1) throw ConfigError("oracle needs at least one trial");
  const int n = f.dimension();
  const bool interior = proposition == "2.2";
  std::vector<GapValue> values(trials);
  std::vector<char> nonnegative_k(trials, 0);
  parallel_for(trials, [&](std::size_t i) {
    if (interior) {
      const InteriorSample s = sample_interior(n, seed, i);
      nonnegative_k[i] = s.k >= 0;
      values[i] = interior_gap(f, s);
    } else {
      values[i] = boundary_form(f, sample_boundary(n, seed, i));
    }
  });
  SuiteResult r;
  r.proposition = proposition;
  r.speed = f.name();
  r.n = n;
  r.trials = trials;
  r.min_value = std::numeric_limits<double>::infinity();
  r.min_normalized = std::numeric_limits<double>::infinity();
  r.nonnegative_k_min_normalized = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trials; ++i) {
    const GapValue& g = values[i];
    r.min_value = std::min(r.min_value, g.value);
    if (g.normalized() < r.min_normalized) {
      r.min_normalized = g.normalized();
      r.worst_trial = i;
    }
    const bool failed = g.value < -kOracleTolerance * g.scale;
    if (failed) ++r.failures;
    if (g.perturbed) ++r.perturbed;
    if (nonnegative_k[i]) {
      ++r.nonnegative_k_trials;
      if (failed) ++r.nonnegative_k_failures;
      r.nonnegative_k_min_normalized = std::min(r.nonnegative_k_min_normalized, g.normalized());
    }
  }
  return r;
}

}  // namespace noncollapse
