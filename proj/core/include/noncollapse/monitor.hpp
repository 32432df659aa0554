#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "noncollapse/geometry.hpp"
#include "noncollapse/speed.hpp"

namespace noncollapse {

/// F = f(kappa) at every grid point. Throws ConvexityLost outside the cone.
Eigen::VectorXd speed_field(const ConvexBody& body, const SpeedFunction& f);

/// One sample of a flow. NaN marks a column that was not computed.
struct MonitorRow {
  static constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

  double t = 0;
  double max_f = 0;
  double min_f = 0;
  double r_plus = 0;
  double r_minus = 0;
  double min_ratio_lower = 0;  // min_x lower(x) / F(x)
  double max_ratio_upper = 0;  // max_x upper(x) / F(x)
  double hausdorff_rescaled = kMissing;
  double t_hat_lo = 0;  // t + r_minus^2 / 2
  double t_hat_hi = 0;  // t + r_plus^2 / 2
  double phi = kMissing;
  double diag_residual = kMissing;
  Point3 in_center = Point3::Zero();  // world coordinates; not part of the CSV

  double t_hat_mid() const { return 0.5 * (t_hat_lo + t_hat_hi); }
};

struct Ratios {
  double min_ratio_lower = 0;
  double max_ratio_upper = 0;
  int argmin = 0;
  int argmax = 0;
  // the current values of the two preserved constants
  double k0_now() const { return min_ratio_lower; }
  double K0_now() const { return max_ratio_upper; }
};

/// Pointwise lower/F and upper/F over the grid; throws DomainError if F <= 0.
Ratios ratios(const ConvexBody& body, const BallCurvatureField& field, const SpeedFunction& f);

/// Field, ratios, radii, extinction bracket, rescaled Hausdorff distance
/// (about the in-center, at the bracket midpoint) and the tangent-plane residual.
MonitorRow observe(const ConvexBody& body, const SpeedFunction& f, FieldOptions options = {});

/// sigma = 0: the min-ratio series itself. sigma = +-1:
/// exp(2 sigma eta t) (ratio - 1 / eta).
std::vector<double> phi(const std::vector<double>& t, const std::vector<double>& min_ratio, int sigma, double eta);

enum class ClaimKind { NonDecreasing, NonIncreasing, ConvergesTo };

struct TrendClaim {
  ClaimKind kind = ClaimKind::NonDecreasing;
  double limit = 0;  // converges-to only
  double tol = 0;    // converges-to only

  static TrendClaim non_decreasing() { return {ClaimKind::NonDecreasing, 0, 0}; }
  static TrendClaim non_increasing() { return {ClaimKind::NonIncreasing, 0, 0}; }
  static TrendClaim converges_to(double limit, double tol) { return {ClaimKind::ConvergesTo, limit, tol}; }
};

std::string to_string(const TrendClaim& claim);

struct TrendVerdict {
  std::string series;
  TrendClaim claim;
  double slack_used = 0;
  bool pass = true;
  double worst_t = 0;
  double worst_amount = 0;  // largest step against the claim (or tail distance)
};

/// Monotone claims: every successive step against the claim is <= slack.
/// converges-to: the last 20% of samples lie within tol (+ slack) of the limit.
/// Needs at least three samples (DomainError otherwise).
TrendVerdict assert_trend(const std::string& series, const std::vector<double>& t, const std::vector<double>& values,
                          TrendClaim claim, double slack);

/// Successive extinction brackets [t + r_minus^2/2, t + r_plus^2/2] must
/// intersect, and their width may grow by at most 1e-6 + 2% of the previous
/// width. worst_amount is the largest miss (gap between brackets or excess growth).
TrendVerdict extinction_nesting(const std::vector<MonitorRow>& rows);

struct RoundnessRow {
  double t = 0;
  double radius_ratio = 0;      // r_plus / r_minus
  double r_minus_scaled = 0;    // r_minus / sqrt(2 (T - t))
  double r_plus_scaled = 0;     // r_plus / sqrt(2 (T - t))
  double center_drift = 0;      // |p - p_t| / sqrt(2 (T - t))
  double hausdorff_rescaled = 0;
};

struct Roundness {
  double t_hat = 0;        // midpoint of the final extinction bracket
  double t_hat_slack = 0;  // half its width
  std::vector<RoundnessRow> rows;
  bool sandwich_holds = true;
  std::size_t worst_index = 0;
  double worst_violation = 0;  // how far a bracket misses the final one (time units)
};

/// The sandwich r_minus <= sqrt(2 (T - t)) <= r_plus with T the final bracket
/// midpoint, plus the rescaled shape series. `snapshots` pairs with `rows`.
/// Throws RunTooShort with fewer than 10 samples or when the run did not reach
/// its max-F target.
Roundness roundness(const std::vector<MonitorRow>& rows, const std::vector<ConvexBody>& snapshots,
                    bool reached_max_f);

/// |q(N) - q(2N)| for q = min lower/F (which = 0), max upper/F (which = 1) or
/// r_plus/r_minus (which = 2), the body resampled spectrally onto the doubled grid.
double discretization_delta(const ConvexBody& body, const SpeedFunction& f, int which = 0);

}  // namespace noncollapse
