#include "noncollapse/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <span>

#include "noncollapse/error.hpp"

namespace noncollapse {

Eigen::VectorXd speed_field(const ConvexBody& body, const SpeedFunction& f) {
  if (f.dimension() != body.dimension())
    throw DomainError("speed dimension " + std::to_string(f.dimension()) + " does not match the body");
  const Eigen::MatrixXd kappa = principal_curvatures(body);
  Eigen::VectorXd out(body.size());
  double z[2];
  for (int j = 0; j < body.size(); ++j) {
    for (int i = 0; i < body.dimension(); ++i) z[i] = kappa(j, i);
    out(j) = f.value(std::span<const double>(z, static_cast<std::size_t>(body.dimension())));
  }
  return out;
}

Ratios ratios(const ConvexBody& body, const BallCurvatureField& field, const SpeedFunction& f) {
  const Eigen::VectorXd F = speed_field(body, f);
  if (!(F.minCoeff() > 0)) throw DomainError("speed is not positive on the body");
  Ratios r;
  r.min_ratio_lower = field.lower(0) / F(0);
  r.max_ratio_upper = field.upper(0) / F(0);
  for (int j = 1; j < body.size(); ++j) {
    const double lo = field.lower(j) / F(j);
    const double hi = field.upper(j) / F(j);
    if (lo < r.min_ratio_lower) {
      r.min_ratio_lower = lo;
      r.argmin = j;
    }
    if (hi > r.max_ratio_upper) {
      r.max_ratio_upper = hi;
      r.argmax = j;
    }
  }
  return r;
}

MonitorRow observe(const ConvexBody& body, const SpeedFunction& f, FieldOptions options) {
  MonitorRow row;
  row.t = body.t();
  const Eigen::VectorXd F = speed_field(body, f);
  row.max_f = F.maxCoeff();
  row.min_f = F.minCoeff();
  const BallCurvatureField field = ball_curvature_field(body, options);
  const Ratios q = ratios(body, field, f);
  row.min_ratio_lower = q.min_ratio_lower;
  row.max_ratio_upper = q.max_ratio_upper;
  const RadiiReport rad = radii(body);
  row.r_plus = rad.r_plus;
  row.r_minus = rad.r_minus;
  row.in_center = rad.in_center;
  row.t_hat_lo = row.t + 0.5 * rad.r_minus * rad.r_minus;
  row.t_hat_hi = row.t + 0.5 * rad.r_plus * rad.r_plus;
  const double scale = std::sqrt(2.0 * (row.t_hat_mid() - row.t));
  try {
    row.hausdorff_rescaled = hausdorff_to_unit_sphere(body.scaled(1.0 / scale), rad.in_center / scale);
  } catch (const CenterOutside&) {
    row.hausdorff_rescaled = MonitorRow::kMissing;
  }
  row.phi = row.min_ratio_lower;
  if (!field.lower_witness[static_cast<std::size_t>(q.argmin)].diagonal)
    row.diag_residual = tangent_plane_diagnostic(body, field, q.argmin);
  return row;
}

std::vector<double> phi(const std::vector<double>& t, const std::vector<double>& m, int sigma, double eta) {
  if (t.size() != m.size()) throw DomainError("phi: time and ratio series differ in length");
  if (sigma < -1 || sigma > 1) throw DomainError("phi: sigma must be -1, 0 or 1");
  if (sigma == 0) return m;
  if (!(eta > 0)) throw DomainError("phi: eta must be positive");
  std::vector<double> out(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) out[i] = std::exp(2.0 * sigma * eta * t[i]) * (m[i] - 1.0 / eta);
  return out;
}

std::string to_string(const TrendClaim& claim) {
  switch (claim.kind) {
    case ClaimKind::NonDecreasing:
      return "non-decreasing";
    case ClaimKind::NonIncreasing:
      return "non-increasing";
    case ClaimKind::ConvergesTo:
      break;
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "converges-to(%.17g, %.17g)", claim.limit, claim.tol);
  return buf;
}

TrendVerdict assert_trend(const std::string& series, const std::vector<double>& t, const std::vector<double>& v,
                          TrendClaim claim, double slack) {
  if (t.size() != v.size()) throw DomainError("assert_trend: time and value series differ in length");
  if (v.size() < 3) throw DomainError("assert_trend: need at least three samples");
  TrendVerdict out;
  out.series = series;
  out.claim = claim;
  out.slack_used = slack;
  out.worst_amount = 0;
  out.worst_t = t.front();
  if (claim.kind == ClaimKind::ConvergesTo) {
    const std::size_t start = std::min(v.size() - 1, static_cast<std::size_t>(std::floor(0.8 * v.size())));
    for (std::size_t i = start; i < v.size(); ++i) {
      const double d = std::abs(v[i] - claim.limit);
      if (!(d <= out.worst_amount)) {
        out.worst_amount = d;
        out.worst_t = t[i];
      }
    }
    out.pass = out.worst_amount <= claim.tol + slack;
    return out;
  }
  const double sign = claim.kind == ClaimKind::NonDecreasing ? 1.0 : -1.0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    const double against = sign * (v[i - 1] - v[i]);
    if (!(against <= out.worst_amount)) {
      out.worst_amount = against;
      out.worst_t = t[i];
    }
  }
  out.pass = out.worst_amount <= slack;
  return out;
}

TrendVerdict extinction_nesting(const std::vector<MonitorRow>& rows) {
  if (rows.size() < 2) throw DomainError("extinction_nesting: need at least two samples");
  TrendVerdict out;
  out.series = "T_hat_interval";
  out.claim = TrendClaim::non_increasing();
  out.slack_used = 0;
  out.worst_t = rows.front().t;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const MonitorRow& a = rows[i - 1];
    const MonitorRow& b = rows[i];
    const double gap = std::max(b.t_hat_lo - a.t_hat_hi, a.t_hat_lo - b.t_hat_hi);
    const double w0 = a.t_hat_hi - a.t_hat_lo;
    const double growth = (b.t_hat_hi - b.t_hat_lo) - w0 - (1e-6 + 0.02 * w0);
    const double miss = std::max(gap, growth);
    if (miss > out.worst_amount) {
      out.worst_amount = miss;
      out.worst_t = b.t;
    }
  }
  out.pass = out.worst_amount <= 0;
  return out;
}

Roundness roundness(const std::vector<MonitorRow>& rows, const std::vector<ConvexBody>& snapshots,
                    bool reached_max_f) {
  if (!reached_max_f) throw RunTooShort("roundness needs a run that reached its max-F target");
  if (rows.size() < 10) throw RunTooShort("roundness needs at least 10 samples");
  if (snapshots.size() != rows.size()) throw DomainError("roundness: snapshots and rows differ in number");
  const MonitorRow& last = rows.back();
  Roundness out;
  out.t_hat = last.t_hat_mid();
  out.t_hat_slack = 0.5 * (last.t_hat_hi - last.t_hat_lo);
  const Point3 p = last.in_center;
  const double floor = 1e-12 * (1.0 + std::abs(out.t_hat));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const MonitorRow& r = rows[i];
    const double s = std::sqrt(2.0 * (out.t_hat - r.t));
    RoundnessRow rr;
    rr.t = r.t;
    rr.radius_ratio = r.r_plus / r.r_minus;
    rr.r_minus_scaled = r.r_minus / s;
    rr.r_plus_scaled = r.r_plus / s;
    rr.center_drift = (p - r.in_center).norm() / s;
    try {
      rr.hausdorff_rescaled = hausdorff_to_unit_sphere(snapshots[i].scaled(1.0 / s), p / s);
    } catch (const CenterOutside&) {
      rr.hausdorff_rescaled = MonitorRow::kMissing;
    }
    out.rows.push_back(rr);
    // r_minus^2/2 <= T - t <= r_plus^2/2, with T known to +- t_hat_slack
    const double miss = std::max(r.t_hat_lo - (out.t_hat + out.t_hat_slack),
                                 (out.t_hat - out.t_hat_slack) - r.t_hat_hi);
    if (miss > out.worst_violation) {
      out.worst_violation = miss;
      out.worst_index = i;
    }
  }
  out.sandwich_holds = out.worst_violation <= floor;
  return out;
}

double discretization_delta(const ConvexBody& body, const SpeedFunction& f, int which) {
  auto quantity = [&](const ConvexBody& b) {
    if (which == 2) {
      const RadiiReport r = radii(b);
      return r.r_plus / r.r_minus;
    }
    const Ratios r = ratios(b, ball_curvature_field(b), f);
    return which == 0 ? r.min_ratio_lower : r.max_ratio_upper;
  };
  return std::abs(quantity(body) - quantity(body.resampled(2 * body.size())));
}

}  // namespace noncollapse
