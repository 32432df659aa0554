#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "noncollapse/error.hpp"
#include "noncollapse/geometry.hpp"
#include "oracles.hpp"

using namespace noncollapse;
using std::numbers::pi;

namespace {

std::vector<Eigen::Vector3d> rows(const Eigen::MatrixXd& m) {
  std::vector<Eigen::Vector3d> out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.emplace_back(m.row(i).transpose());
  return out;
}

}  // namespace

TEST(Embed, UnitCircleAndHandPoint) {
  const Embedding e = embed(sphere(BodyMode::Curve, 64));
  for (int j = 0; j < 64; ++j) {
    EXPECT_NEAR(e.points.row(j).norm(), 1.0, 1e-14);
    EXPECT_LE((e.points.row(j) - e.normals.row(j)).norm(), 1e-14);
  }
  const ConvexBody b = from_support_function(BodyMode::Curve, 64, [](double t) { return 1 + 0.1 * std::cos(2 * t); });
  const Embedding f = embed(b);
  EXPECT_NEAR(f.points(0, 0), 1.1, 1e-14);
  EXPECT_NEAR(f.points(0, 1), 0.0, 1e-14);
  EXPECT_EQ(f.points(0, 2), 0.0);
}

TEST(Embed, SupportFunctionRoundTrip) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const ConvexBody b = random_convex_body(BodyMode::Curve, 128, seed);
    const Embedding e = embed(b);
    const auto pts = rows(e.points);
    for (int j = 0; j < b.size(); ++j) {
      const Eigen::Vector3d u = e.normals.row(j).transpose();
      EXPECT_NEAR(oracle::support(pts, u) - u.dot(b.offset()), b.h()(j), 1e-8);
    }
  }
}

TEST(Embed, RevolvedSurfaceHasTheProfileSupport) {
  const ConvexBody b = ellipsoid(65, 1.0, 1.5);
  const Embedding e = embed_revolved(b, 16);
  ASSERT_EQ(e.points.rows(), 65 * 16);
  const auto pts = rows(e.points);
  const Embedding profile = embed(b);
  for (int j = 0; j < 65; j += 8)
    for (int k = 0; k < 16; k += 5) {
      const Eigen::Vector3d u = e.normals.row(j * 16 + k).transpose();
      EXPECT_NEAR(oracle::support(pts, u), b.h()(j), 1e-10);
      const double radial = std::hypot(e.points(j * 16 + k, 0), e.points(j * 16 + k, 1));
      EXPECT_NEAR(radial, std::abs(profile.points(j, 0)), 1e-12);
    }
}

TEST(PrincipalCurvatures, SphereAndEllipse) {
  const Eigen::MatrixXd k = principal_curvatures(sphere(BodyMode::Axisymmetric, 33, 2.0));
  EXPECT_LE((k.array() - 0.5).abs().maxCoeff(), 1e-12);
  const ConvexBody e = ellipse(256, 1.0, 2.0);
  const Eigen::MatrixXd ke = principal_curvatures(e);
  for (int j = 0; j < 256; ++j) {
    const double t = oracle::ellipse_parameter(1.0, 2.0, e.grid().theta()(j));
    EXPECT_NEAR(ke(j, 0), oracle::ellipse_curvature(1.0, 2.0, t), 1e-10);
  }
}

TEST(PrincipalCurvatures, SpheroidAgainstTheParametrisation) {
  const ConvexBody e = ellipsoid(129, 1.0, 2.0);
  const Eigen::MatrixXd k = principal_curvatures(e);
  for (int j = 1; j < 128; ++j) {
    const auto ref = oracle::spheroid_curvatures(1.0, 2.0, e.grid().theta()(j));
    EXPECT_NEAR(k(j, 0), ref.meridian, 1e-9) << j;
    EXPECT_NEAR(k(j, 1), ref.parallel, 1e-9) << j;
  }
  // umbilic poles: c / a^2
  EXPECT_NEAR(k(0, 0), 2.0, 1e-9);
  EXPECT_NEAR(k(128, 1), 2.0, 1e-9);
  EXPECT_NEAR(k(64, 0), 0.25, 1e-10);
  EXPECT_NEAR(k(64, 1), 1.0, 1e-10);
}

TEST(PrincipalCurvatures, SpectralAgreesWithFiniteDifferences) {
  const ConvexBody b = random_convex_body(BodyMode::Curve, 512, 9);
  const Eigen::MatrixXd k = principal_curvatures(b);
  const double dt = 2 * pi / 512;
  for (int j = 0; j < 512; ++j) {
    const double fd = (b.h()((j + 1) % 512) - 2 * b.h()(j) + b.h()((j + 511) % 512)) / (dt * dt) + b.h()(j);
    EXPECT_NEAR(1.0 / k(j, 0), fd, 1e-4 * std::abs(fd));
  }
}

TEST(ConvexBody, LosesConvexity) {
  Eigen::VectorXd h = Eigen::VectorXd::Ones(32);
  for (int j = 0; j < 32; ++j) h(j) += 0.2 * std::cos(4 * 2 * pi * j / 32);
  const ConvexBody b(BodyMode::Curve, h);
  EXPECT_THROW(b.check_convex(), ConvexityLost);
  EXPECT_THROW(embed(b), ConvexityLost);
  EXPECT_THROW(ball_curvature_field(b), ConvexityLost);
}

TEST(BallCurvaturePair, SpheresAndTheEllipseAxis) {
  const ConvexBody c = sphere(BodyMode::Curve, 64, 1.0);
  for (int y = 5; y < 60; y += 7) EXPECT_NEAR(ball_curvature_pair(c, 0, y), 1.0, 1e-14);
  const ConvexBody s = sphere(BodyMode::Axisymmetric, 33, 3.0);
  EXPECT_NEAR(ball_curvature_pair(s, 4, 20, 9), 1.0 / 3.0, 1e-14);
  const ConvexBody e = ellipse(512, 1.0, 2.0);
  EXPECT_NEAR(ball_curvature_pair(e, 128, 384), 0.5, 1e-14);
  EXPECT_THROW(ball_curvature_pair(c, 3, 3), PairTooClose);
  EXPECT_THROW(ball_curvature_pair(c, 3, 4), PairTooClose);
}

TEST(BallCurvatureField, Spheres) {
  for (BodyMode m : {BodyMode::Curve, BodyMode::Axisymmetric}) {
    const BallCurvatureField f = ball_curvature_field(sphere(m, 64, 2.0));
    EXPECT_LE((f.lower.array() - 0.5).abs().maxCoeff(), 1e-11);
    EXPECT_LE((f.upper.array() - 0.5).abs().maxCoeff(), 1e-11);
  }
}

TEST(BallCurvatureField, EllipseLongAxisTipAgainstExhaustiveSearch) {
  const ConvexBody e = ellipse(512, 1.0, 2.0);
  const BallCurvatureField f = ball_curvature_field(e);
  EXPECT_NEAR(f.lower(128), 0.5, 1e-3);
  EXPECT_FALSE(f.lower_witness[128].diagonal);
  EXPECT_EQ(f.lower_witness[128].index, 384);
  EXPECT_NEAR(f.upper(128), f.kappa_max(128), 1e-12);
  EXPECT_TRUE(f.upper_witness[128].diagonal);

  // dense explicit ellipse, independent of the support-function machinery
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < 20000; ++i) {
    const Eigen::Vector2d p = oracle::ellipse_point(1.0, 2.0, 2 * pi * i / 20000);
    pts.emplace_back(p.x(), p.y(), 0.0);
  }
  for (int j : {0, 37, 100, 128, 200, 311}) {
    const double th = e.grid().theta()(j);
    const double t = oracle::ellipse_parameter(1.0, 2.0, th);
    const Eigen::Vector2d x = oracle::ellipse_point(1.0, 2.0, t);
    const oracle::PairExtrema ref = oracle::exhaustive_pairs(pts, {x.x(), x.y(), 0}, {std::cos(th), std::sin(th), 0}, 0.05);
    const double kappa = oracle::ellipse_curvature(1.0, 2.0, t);
    EXPECT_NEAR(f.lower(j), std::min(ref.lower, kappa), 1e-6) << j;
    EXPECT_NEAR(f.upper(j), std::max(ref.upper, kappa), 1e-6) << j;
  }
}

TEST(BallCurvatureField, SandwichOnRandomBodies) {
  for (std::uint64_t seed = 0; seed < 12; ++seed)
    for (BodyMode m : {BodyMode::Curve, BodyMode::Axisymmetric}) {
      const BallCurvatureField f = ball_curvature_field(random_convex_body(m, m == BodyMode::Curve ? 128 : 33, seed));
      for (Eigen::Index j = 0; j < f.lower.size(); ++j) {
        EXPECT_LE(f.lower(j), f.kappa_min(j) + 1e-10);
        EXPECT_LE(f.kappa_min(j), f.kappa_max(j));
        EXPECT_LE(f.kappa_max(j), f.upper(j) + 1e-10);
      }
    }
}

TEST(BallCurvatureField, ScalingAndTranslation) {
  const ConvexBody b = random_convex_body(BodyMode::Curve, 128, 4);
  const BallCurvatureField f = ball_curvature_field(b);
  const BallCurvatureField s = ball_curvature_field(b.scaled(2.5));
  const BallCurvatureField t = ball_curvature_field(b.translated({0.3, -0.7, 0.0}));
  for (Eigen::Index j = 0; j < f.lower.size(); ++j) {
    EXPECT_NEAR(s.lower(j) * 2.5, f.lower(j), 1e-10 * f.lower(j));
    EXPECT_NEAR(s.upper(j) * 2.5, f.upper(j), 1e-10 * f.upper(j));
    EXPECT_NEAR(t.lower(j), f.lower(j), 1e-10);
    EXPECT_NEAR(t.upper(j), f.upper(j), 1e-10);
    EXPECT_NEAR(t.kappa_min(j), f.kappa_min(j), 1e-10);
  }
}

TEST(BallCurvatureField, RefinementIsStable) {
  const ConvexBody b = random_convex_body(BodyMode::Curve, 64, 2);
  for (int n : {64, 128}) {
    const BallCurvatureField f = ball_curvature_field(b.resampled(n));
    const BallCurvatureField g = ball_curvature_field(b.resampled(2 * n));
    for (int j = 0; j < n; ++j) {
      EXPECT_LE(std::abs(f.lower(j) - g.lower(2 * j)), 1.0 / (n * n)) << n << " " << j;
      EXPECT_LE(std::abs(f.upper(j) - g.upper(2 * j)), 1.0 / (n * n)) << n << " " << j;
    }
  }
}

TEST(Radii, SpheresAndEllipse) {
  for (BodyMode m : {BodyMode::Curve, BodyMode::Axisymmetric}) {
    const RadiiReport r = radii(sphere(m, 64, 1.7).translated({0.0, 0.0, m == BodyMode::Curve ? 0.0 : 0.4}));
    EXPECT_NEAR(r.r_minus, 1.7, 1e-9);
    EXPECT_NEAR(r.r_plus, 1.7, 1e-9);
  }
  const RadiiReport t = radii(sphere(BodyMode::Curve, 64, 1.0).translated({0.3, -0.2, 0.0}));
  EXPECT_LE((t.in_center - Point3(0.3, -0.2, 0)).norm(), 1e-6);
  EXPECT_LE((t.circ_center - Point3(0.3, -0.2, 0)).norm(), 1e-9);
  const RadiiReport e = radii(ellipse(256, 1.0, 2.0));
  EXPECT_NEAR(e.r_minus, 1.0, 1e-9);
  EXPECT_NEAR(e.r_plus, 2.0, 1e-9);
  const RadiiReport s = radii(ellipsoid(65, 1.0, 1.5));
  EXPECT_NEAR(s.r_minus, 1.0, 1e-9);
  EXPECT_NEAR(s.r_plus, 1.5, 1e-9);
}

TEST(Radii, AreaBracketsTheDisks) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ConvexBody b = random_convex_body(BodyMode::Curve, 256, seed);
    const RadiiReport r = radii(b);
    const double area = oracle::support_area({b.h().data(), b.h().data() + b.size()});
    EXPECT_LE(pi * r.r_minus * r.r_minus, area);
    EXPECT_GE(pi * r.r_plus * r.r_plus, area);
    EXPECT_LE(r.r_plus, 2 * b.h().maxCoeff());
  }
}

TEST(Hausdorff, SupportFunctionDistance) {
  EXPECT_NEAR(hausdorff_to_unit_sphere(sphere(BodyMode::Curve, 64), Point3::Zero()), 0.0, 1e-15);
  EXPECT_NEAR(hausdorff_to_unit_sphere(sphere(BodyMode::Axisymmetric, 33, 1.1), Point3::Zero()), 0.1, 1e-14);
  EXPECT_NEAR(hausdorff_to_unit_sphere(ellipse(64, 1.0, 2.0), Point3::Zero()), 1.0, 1e-14);
  const ConvexBody moved = sphere(BodyMode::Curve, 64).translated({0.5, 0.0, 0.0});
  EXPECT_NEAR(hausdorff_to_unit_sphere(moved, {0.5, 0.0, 0.0}), 0.0, 1e-14);
  EXPECT_THROW(hausdorff_to_unit_sphere(moved, {3.0, 0.0, 0.0}), CenterOutside);
}

TEST(TangentPlane, EllipseTip) {
  const ConvexBody e = ellipse(512, 1.0, 2.0);
  const BallCurvatureField f = ball_curvature_field(e);
  EXPECT_LE(tangent_plane_diagnostic(e, f, 128), 1e-3);
  for (int i = 0; i < 512; ++i)
    if (f.lower_witness[i].diagonal) {
      EXPECT_THROW(tangent_plane_diagnostic(e, f, i), DiagonalWitness);
      break;
    }
}

TEST(TangentPlane, GridWitnessConvergesAndPolishedWitnessIsStationary) {
  const ConvexBody b = random_convex_body(BodyMode::Curve, 64, 3);
  auto worst = [&](int n, bool polish) {
    const ConvexBody e = b.resampled(n);
    const BallCurvatureField f = ball_curvature_field(e, {.polish = polish});
    double m = 0;
    for (int q = 0; q < 16; ++q)
      if (!f.lower_witness[q * n / 16].diagonal) m = std::max(m, tangent_plane_diagnostic(e, f, q * n / 16));
    return m;
  };
  // a grid witness is off by up to half a spacing, so the residual is first order
  EXPECT_LE(worst(512, false), worst(64, false) / 4);
  EXPECT_LE(worst(128, true), 1e-6);
}
