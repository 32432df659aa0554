#include <gtest/gtest.h>

#include <cmath>

#include "noncollapse/error.hpp"
#include "noncollapse/flow.hpp"
#include "noncollapse/monitor.hpp"

using namespace noncollapse;

namespace {

MonitorRow bracket(double t, double lo, double hi) {
  MonitorRow r;
  r.t = t;
  r.t_hat_lo = lo;
  r.t_hat_hi = hi;
  return r;
}

// Exact shrinking-sphere samples of radius sqrt(1 - 2 t).
std::pair<std::vector<MonitorRow>, std::vector<ConvexBody>> sphere_samples(int count) {
  std::vector<MonitorRow> rows;
  std::vector<ConvexBody> bodies;
  for (int i = 0; i < count; ++i) {
    const double t = 0.5 * (1 - std::pow(0.5, i));
    const double r = std::sqrt(1 - 2 * t);
    MonitorRow row;
    row.t = t;
    row.r_plus = row.r_minus = r;
    row.t_hat_lo = row.t_hat_hi = t + r * r / 2;
    row.max_f = 1 / r;
    rows.push_back(row);
    bodies.push_back(sphere(BodyMode::Curve, 16, r).at_time(t));
  }
  return {rows, bodies};
}

}  // namespace

TEST(SpeedField, SphereAndConvexityLoss) {
  const Eigen::VectorXd f = speed_field(sphere(BodyMode::Axisymmetric, 17, 4.0), SpeedFunction::harmonic_mean(2));
  EXPECT_LE((f.array() - 0.25).abs().maxCoeff(), 1e-14);
  Eigen::VectorXd h = Eigen::VectorXd::Ones(16);
  h(3) = 0.2;
  EXPECT_THROW(speed_field(ConvexBody(BodyMode::Curve, h), SpeedFunction::arithmetic_mean(1)), ConvexityLost);
}

TEST(Ratios, SphereIsOne) {
  const ConvexBody b = sphere(BodyMode::Curve, 32, 3.0);
  const Ratios r = ratios(b, ball_curvature_field(b), SpeedFunction::arithmetic_mean(1));
  EXPECT_NEAR(r.k0_now(), 1.0, 1e-10);
  EXPECT_NEAR(r.K0_now(), 1.0, 1e-10);
}

TEST(Ratios, EllipseUsesThePointwiseQuotient) {
  const ConvexBody b = ellipse(128, 1.0, 2.0);
  const BallCurvatureField field = ball_curvature_field(b);
  const Ratios r = ratios(b, field, SpeedFunction::arithmetic_mean(1));
  const Eigen::VectorXd q = field.lower.cwiseQuotient(field.kappa_min);
  EXPECT_DOUBLE_EQ(r.min_ratio_lower, q.minCoeff());
  EXPECT_DOUBLE_EQ(q(r.argmin), r.min_ratio_lower);
  EXPECT_LT(r.min_ratio_lower, 1.0);
  EXPECT_GT(r.max_ratio_upper, 1.0);
}

TEST(Observe, UnitSphere) {
  const MonitorRow row = observe(sphere(BodyMode::Axisymmetric, 33), SpeedFunction::arithmetic_mean(2));
  EXPECT_NEAR(row.max_f, 1.0, 1e-12);
  EXPECT_NEAR(row.min_f, 1.0, 1e-12);
  EXPECT_NEAR(row.r_plus, 1.0, 1e-9);
  EXPECT_NEAR(row.r_minus, 1.0, 1e-9);
  EXPECT_NEAR(row.t_hat_lo, 0.5, 1e-9);
  EXPECT_NEAR(row.t_hat_hi, 0.5, 1e-9);
  EXPECT_NEAR(row.hausdorff_rescaled, 0.0, 1e-8);
}

TEST(Phi, HandValues) {
  const std::vector<double> t{0.0, 1.0};
  const std::vector<double> m{0.5, 0.25};
  EXPECT_EQ(phi(t, m, 0, 1.0), m);
  const std::vector<double> up = phi(t, m, 1, 2.0);
  EXPECT_NEAR(up[0], 0.0, 1e-15);
  EXPECT_NEAR(up[1], std::exp(4.0) * (0.25 - 0.5), 1e-12);
  const std::vector<double> down = phi(t, m, -1, 0.5);
  EXPECT_NEAR(down[1], std::exp(-1.0) * (0.25 - 2.0), 1e-14);
}

TEST(AssertTrend, MonotoneClaimsAndSlack) {
  const std::vector<double> t{0, 1, 2, 3};
  const std::vector<double> up{1.0, 1.1, 1.09, 1.2};
  const TrendVerdict strict = assert_trend("s", t, up, TrendClaim::non_decreasing(), 0.0);
  EXPECT_FALSE(strict.pass);
  EXPECT_NEAR(strict.worst_amount, 0.01, 1e-12);
  EXPECT_EQ(strict.worst_t, 2.0);
  EXPECT_TRUE(assert_trend("s", t, up, TrendClaim::non_decreasing(), 0.02).pass);
  EXPECT_FALSE(assert_trend("s", t, up, TrendClaim::non_increasing(), 0.02).pass);
  const std::vector<double> down{3, 2, 2, 1};
  EXPECT_TRUE(assert_trend("s", t, down, TrendClaim::non_increasing(), 0.0).pass);
  EXPECT_THROW(assert_trend("s", {0, 1}, {0, 1}, TrendClaim::non_decreasing(), 0), DomainError);
  EXPECT_EQ(to_string(TrendClaim::non_decreasing()), "non-decreasing");
}

TEST(AssertTrend, ConvergesToLooksAtTheTail) {
  std::vector<double> t, v;
  for (int i = 0; i < 10; ++i) {
    t.push_back(i);
    v.push_back(1.0 + std::pow(0.1, i));
  }
  EXPECT_TRUE(assert_trend("s", t, v, TrendClaim::converges_to(1.0, 1e-6), 0.0).pass);
  EXPECT_FALSE(assert_trend("s", t, v, TrendClaim::converges_to(1.0, 1e-12), 0.0).pass);
}

TEST(ExtinctionNesting, IntersectingAndShrinking) {
  const std::vector<MonitorRow> good{bracket(0, 0.40, 0.60), bracket(0.1, 0.45, 0.55), bracket(0.2, 0.49, 0.51)};
  const TrendVerdict v = extinction_nesting(good);
  EXPECT_TRUE(v.pass);
  EXPECT_EQ(v.series, "T_hat_interval");
  const std::vector<MonitorRow> gap{bracket(0, 0.40, 0.45), bracket(0.1, 0.46, 0.50), bracket(0.2, 0.47, 0.49)};
  const TrendVerdict g = extinction_nesting(gap);
  EXPECT_FALSE(g.pass);
  EXPECT_NEAR(g.worst_amount, 0.01, 1e-12);
  const std::vector<MonitorRow> grow{bracket(0, 0.40, 0.60), bracket(0.1, 0.35, 0.65), bracket(0.2, 0.36, 0.64)};
  EXPECT_FALSE(extinction_nesting(grow).pass);
}

TEST(Roundness, ExactSphereSamples) {
  const auto [rows, bodies] = sphere_samples(12);
  const Roundness r = roundness(rows, bodies, true);
  EXPECT_NEAR(r.t_hat, 0.5, 1e-15);
  EXPECT_TRUE(r.sandwich_holds);
  ASSERT_EQ(r.rows.size(), 12u);
  for (const RoundnessRow& row : r.rows) {
    EXPECT_NEAR(row.radius_ratio, 1.0, 1e-15);
    EXPECT_NEAR(row.r_minus_scaled, 1.0, 1e-12);
    EXPECT_NEAR(row.r_plus_scaled, 1.0, 1e-12);
  }
}

TEST(Roundness, TooShortOrUnfinished) {
  const auto [rows, bodies] = sphere_samples(9);
  EXPECT_THROW(roundness(rows, bodies, true), RunTooShort);
  const auto [more, shapes] = sphere_samples(12);
  EXPECT_THROW(roundness(more, shapes, false), RunTooShort);
}

TEST(Roundness, SandwichViolationIsReported) {
  auto [rows, bodies] = sphere_samples(12);
  rows[3].r_plus = rows[3].r_minus = 0.5 * rows[3].r_minus;
  rows[3].t_hat_lo = rows[3].t_hat_hi = rows[3].t + rows[3].r_plus * rows[3].r_plus / 2;
  const Roundness r = roundness(rows, bodies, true);
  EXPECT_FALSE(r.sandwich_holds);
  EXPECT_EQ(r.worst_index, 3u);
  EXPECT_GT(r.worst_violation, 0.0);
}

TEST(DiscretizationDelta, VanishesOnASphereAndIsSmallWhenResolved) {
  const SpeedFunction f = SpeedFunction::arithmetic_mean(1);
  EXPECT_LE(discretization_delta(sphere(BodyMode::Curve, 32), f, 0), 1e-10);
  EXPECT_LE(discretization_delta(sphere(BodyMode::Curve, 32), f, 2), 1e-10);
  const double d = discretization_delta(ellipse(128, 1.0, 1.5), f, 0);
  EXPECT_GE(d, 0.0);
  EXPECT_LE(d, 1e-4);
}
