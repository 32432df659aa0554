#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "noncollapse/spectral.hpp"

namespace noncollapse {

using Point3 = Eigen::Vector3d;

/// A convex body given by its support function on a spectral grid.
///
/// Curve: a closed plane curve, h sampled at theta_j = 2 pi j / N, normal
/// z = (cos theta, sin theta). Axisymmetric: a surface of revolution about the
/// third axis, h sampled at polar angles theta_j = pi j / (N - 1), normal
/// z = (sin theta cos phi, sin theta sin phi, cos theta).
///
/// Points live in R^3 for both modes; curves use the first two coordinates.
/// The support function is taken about `offset`, so world points are
/// offset + body-frame points.
class ConvexBody {
 public:
  ConvexBody(BodyMode mode, Eigen::VectorXd h, double t = 0.0, Point3 offset = Point3::Zero());

  BodyMode mode() const noexcept { return grid_->mode(); }
  int size() const noexcept { return grid_->size(); }
  /// Number of principal curvatures: 1 for curves, 2 for surfaces.
  int dimension() const noexcept { return mode() == BodyMode::Curve ? 1 : 2; }
  double t() const noexcept { return t_; }
  const Point3& offset() const noexcept { return offset_; }
  const SpectralGrid& grid() const noexcept { return *grid_; }
  std::shared_ptr<const SpectralGrid> grid_ptr() const noexcept { return grid_; }

  const Eigen::VectorXd& h() const noexcept { return h_; }
  const Eigen::VectorXd& dh() const noexcept { return dh_; }
  const Eigen::VectorXd& ddh() const noexcept { return ddh_; }
  /// Principal radii: r1 = h'' + h; r2 = h' cot(theta) + h (surfaces only, r1 at the poles).
  const Eigen::VectorXd& r1() const noexcept { return r1_; }
  const Eigen::VectorXd& r2() const noexcept { return r2_; }
  double min_radius() const;
  double max_radius() const;

  /// Unit normal at grid point j (azimuth 0 for surfaces).
  Point3 normal(int j) const;
  /// Body-frame point at grid point j (azimuth 0 for surfaces).
  Point3 point(int j) const;

  /// Throws ConvexityLost naming the first grid index with a radius <= 0.
  void check_convex() const;

  ConvexBody with_h(Eigen::VectorXd h, double t) const;
  ConvexBody at_time(double t) const;
  /// s * body (support function and offset scale).
  ConvexBody scaled(double s) const;
  /// body + v, realised in the support function: h(z) + <v, z>.
  ConvexBody translated(const Point3& v) const;
  /// Moves the support-function origin to world point `center`.
  ConvexBody recentered(const Point3& center) const;
  /// Same body on an N-point grid of the same mode (spectral interpolation).
  ConvexBody resampled(int n) const;

  /// Interpolant coefficients of h (computed on first use).
  const Eigen::VectorXd& coefficients() const;

 private:
  std::shared_ptr<const SpectralGrid> grid_;
  Eigen::VectorXd h_, dh_, ddh_, r1_, r2_;
  double t_;
  Point3 offset_;
  mutable std::shared_ptr<Eigen::VectorXd> coeffs_;
};

/// Unit normal for a direction parameter (theta, phi); phi is ignored for curves.
Point3 direction(BodyMode mode, double theta, double phi = 0.0);

// Shapes.
ConvexBody sphere(BodyMode mode, int n, double radius = 1.0);
/// Ellipse with semi-axes a (first axis) and b (second axis).
ConvexBody ellipse(int n, double a, double b);
/// Spheroid with equatorial semi-axis a and polar semi-axis c.
ConvexBody ellipsoid(int n, double a, double c);
ConvexBody from_support_function(BodyMode mode, int n, const std::function<double(double)>& h);
/// A smooth, strictly convex body: unit sphere plus a few random low modes
/// (bounded so every radius stays >= 0.3), then a random translation.
ConvexBody random_convex_body(BodyMode mode, int n, std::uint64_t seed);

struct Embedding {
  Eigen::MatrixXd points;   // N x 3, world coordinates
  Eigen::MatrixXd normals;  // N x 3
};
/// Curve: X = h z + h' z'. Surface: the profile curve at azimuth 0 (revolve with
/// embed_revolved). Throws ConvexityLost.
Embedding embed(const ConvexBody& body);
/// Surface points on an N x n_phi (theta, phi) grid, rows ordered theta-major.
Embedding embed_revolved(const ConvexBody& body, int n_phi);

/// N x dimension matrix of principal curvatures (kappa_1 = 1/r1, kappa_2 = 1/r2).
Eigen::MatrixXd principal_curvatures(const ConvexBody& body);

/// 2 <X - Y, nu_X> / |X - Y|^2 between grid point x and grid point y (at
/// azimuth 2 pi phi_index / N for surfaces). Throws PairTooClose inside the
/// separation band.
double ball_curvature_pair(const ConvexBody& body, int x_index, int y_index, int phi_index = 0);

/// Pair value at a continuous parameter for y (world-independent).
double ball_curvature_at(const ConvexBody& body, int x_index, double theta_y, double phi_y = 0.0);

/// Excluded distance around x: 3 grid spacings times the largest radius at x.
double separation_tolerance(const ConvexBody& body, int x_index);

struct BallWitness {
  bool diagonal = true;
  int index = -1;      // nearest theta grid index of y
  int phi_index = -1;  // nearest azimuth index (surfaces)
  double theta = 0;
  double phi = 0;
};

struct BallCurvatureField {
  Eigen::VectorXd lower;  // inf_y k(x, y), diagonal included
  Eigen::VectorXd upper;  // sup_y k(x, y), diagonal included
  Eigen::VectorXd kappa_min;
  Eigen::VectorXd kappa_max;
  std::vector<BallWitness> lower_witness;
  std::vector<BallWitness> upper_witness;
};

struct FieldOptions {
  /// Refine grid extrema (and search the separation band) on the spectral interpolant.
  bool polish = true;
};

BallCurvatureField ball_curvature_field(const ConvexBody& body, FieldOptions options = {});

struct RadiiReport {
  double r_minus = 0;
  double r_plus = 0;
  Point3 in_center = Point3::Zero();    // world coordinates
  Point3 circ_center = Point3::Zero();  // world coordinates
};
RadiiReport radii(const ConvexBody& body);

/// max over directions of |h(z) - <c, z> - 1| with c the center in world
/// coordinates (taken relative to the body's offset).
double hausdorff_to_unit_sphere(const ConvexBody& body, const Point3& center);

/// Residual of <dY, nu_x - k d w> = 0 at the off-diagonal witness of the lower field.
double tangent_plane_diagnostic(const ConvexBody& body, const BallCurvatureField& field, int x_index);

}  // namespace noncollapse
