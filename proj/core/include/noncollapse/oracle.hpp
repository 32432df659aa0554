#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "noncollapse/speed.hpp"

namespace noncollapse {

/// A (A, B, k) triple for the interior estimate. B is diagonal, A is any
/// positive-definite matrix, and k lies strictly below both spectra.
struct InteriorSample {
  Mat a;
  Mat b;
  double k = 0;
};

/// Eigenvalues of A (ascending, lambda(0) smallest) and a symmetric B with
/// B(0,0) = 0, standing for the contraction T(y, ., .) of a totally symmetric
/// 3-tensor with T(y, y, y) = 0, y the bottom eigenvector.
struct BoundarySample {
  Vec lambda;
  Mat b;
};

/// A value and the magnitude of the largest term that went into it; the
/// positivity checks accept value >= -1e-7 * scale.
struct GapValue {
  double value = 0;
  double scale = 1;
  bool perturbed = false;  // boundary form: degenerate spectrum was split

  double normalized() const { return value / scale; }
};

inline constexpr double kOracleTolerance = 1e-7;

struct OracleVerdict {
  double value = 0;
  double lower_bound_checked = 0;  // -tol
  Mat optimizer;                   // the closed-form Lambda
  std::optional<double> brute_force_value;
};

/// Lambda = (A - kI)(B - kI)^{-1}. Throws SingularShift if either shifted
/// spectrum has a member <= 1e-12.
Mat optimal_lambda(const Mat& a, const Mat& b, double k);

/// F-dot^{ij}(A) [(k - A) - 2 Lambda (k - A) + Lambda (k - B) Lambda^T]_{ij}:
/// the objective maximised over Lambda in the interior estimate.
double interior_bracket(const SpeedFunction& f, const Mat& a, const Mat& b, double k, const Mat& lambda);

/// q_a(z) = f(z) - f(a) - sum_i f-dot^i(a) [(a_i - k) - (a_i - k)^2 / (z_i - k)].
double q_function(const SpeedFunction& f, const Vec& a, const Vec& z, double k);

/// Interior gap in diagonal form: a = lambda(A) ascending paired with the
/// diagonal of B in stored order.
GapValue interior_gap(const SpeedFunction& f, const InteriorSample& s);

/// The matrix expression F(B) - F(A) - F-dot(A) : ((A - k) - (A - k)(B - k)^{-1}(A - k)).
/// Coincides with the diagonal form when A and B commute; it is not
/// sign-definite for non-commuting pairs (see README).
GapValue interior_gap_matrix(const SpeedFunction& f, const Mat& a, const Mat& b, double k);

struct QSecondDerivative {
  Mat lhs;  // q-ddot + 2 diag(q-dot / (z - k)), from derivatives of q_a
  Mat rhs;  // f-ddot + 2 diag(f-dot / (z - k)), from derivatives of f
};
QSecondDerivative q_second_derivative_check(const SpeedFunction& f, const Vec& a, const Vec& z, double k);

struct BoundaryOptions {
  /// Split a degenerate bottom eigenvalue by +i * 10 * gap_tol and flag the
  /// result instead of throwing DegenerateSpectrum.
  bool perturb_degenerate = true;
};

/// f-ddot^{pq} B_pp B_qq + sum_{p != q} (f-dot^p - f-dot^q)/(lambda_p - lambda_q) B_pq^2
///   + 2 sum_{p, q >= 2} f-dot^p / (lambda_q - lambda_1) B_pq^2.
GapValue boundary_form(const SpeedFunction& f, const BoundarySample& s, BoundaryOptions opts = {});

/// The last sum alone: the supremum over Lambda in closed form.
double boundary_sup_closed_form(const SpeedFunction& f, const BoundarySample& s);

struct BruteForceBoundary {
  double value = 0;        // supremum found
  double stationary = 0;   // value at the solved stationary point
  double best_random = 0;  // best value over random restarts
  Mat optimizer;           // ambient-coordinate Lambda at the stationary point
};

/// Rebuilds the boundary sample in rotated ambient coordinates (A = U diag(lambda) U^T,
/// y = U e_1, a full totally symmetric T) and maximises the Lambda-quadratic by a
/// pseudo-inverse stationary solve plus `restarts` random probes.
BruteForceBoundary brute_force_boundary(const SpeedFunction& f, const BoundarySample& s, int restarts,
                                        std::uint64_t seed);

/// Value of the ambient Lambda-quadratic at a given Lambda (exposed for dominance tests).
double boundary_lambda_objective(const Mat& fdot, const Mat& a, const Mat& c, const Mat& lambda);

OracleVerdict evaluate_interior(const SpeedFunction& f, const InteriorSample& s);
OracleVerdict evaluate_boundary(const SpeedFunction& f, const BoundarySample& s, bool with_brute_force,
                                std::uint64_t seed = 0);

// Samplers: log-uniform spectra in [1e-2, 1e2]; interior k uniform in (-1, 0.9 min).
InteriorSample sample_interior(int n, std::uint64_t seed, std::uint64_t trial);
BoundarySample sample_boundary(int n, std::uint64_t seed, std::uint64_t trial);

struct SuiteResult {
  std::string proposition;  // "2.2" or "2.5"
  std::string speed;
  int n = 0;
  std::size_t trials = 0;
  double min_value = 0;       // raw minimum over trials
  double min_normalized = 0;  // minimum of value / scale
  std::size_t worst_trial = 0;
  std::size_t failures = 0;  // trials below -tol * scale
  std::size_t perturbed = 0;
  // interior suite only: the same statistics over trials whose shift k is >= 0
  std::size_t nonnegative_k_trials = 0;
  std::size_t nonnegative_k_failures = 0;
  double nonnegative_k_min_normalized = 0;
  bool passed() const { return failures == 0; }
};

/// Runs `trials` randomized samples of the interior (prop "2.2") or boundary
/// (prop "2.5") estimate.
SuiteResult run_suite(const std::string& proposition, const SpeedFunction& f, std::size_t trials,
                      std::uint64_t seed);

}  // namespace noncollapse
