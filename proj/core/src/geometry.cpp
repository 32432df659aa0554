#include "noncollapse/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <tuple>
#include <utility>

#include <boost/math/tools/minima.hpp>

#include "noncollapse/error.hpp"
#include "noncollapse/miniball.hpp"
#include "noncollapse/parallel.hpp"
#include "noncollapse/random.hpp"

namespace noncollapse {
namespace {

using std::numbers::pi;
constexpr int kBrentBits = std::numeric_limits<double>::digits / 2;
constexpr double kPenalty = 1e300;

template <class F>
std::pair<double, double> brent(F&& f, double lo, double hi) {
  return boost::math::tools::brent_find_minima(f, lo, hi, kBrentBits);
}

// Body-frame point and normal for a continuous direction parameter.
struct Surfel {
  Point3 x;
  Point3 nu;
};

Surfel surfel_at(const ConvexBody& body, const SpectralGrid::Sample& s, double theta, double phi) {
  Surfel out;
  if (body.mode() == BodyMode::Curve) {
    const double c = std::cos(theta), sn = std::sin(theta);
    out.x = Point3(s.h * c - s.dh * sn, s.h * sn + s.dh * c, 0.0);
    out.nu = Point3(c, sn, 0.0);
  } else {
    const double c = std::cos(theta), sn = std::sin(theta);
    const double rho = s.h * sn + s.dh * c;
    const double z = s.h * c - s.dh * sn;
    out.x = Point3(rho * std::cos(phi), rho * std::sin(phi), z);
    out.nu = direction(BodyMode::Axisymmetric, theta, phi);
  }
  return out;
}

Surfel surfel_at(const ConvexBody& body, double theta, double phi) {
  return surfel_at(body, body.grid().evaluate(body.coefficients(), theta), theta, phi);
}

double pair_value(const Point3& x, const Point3& nu, const Point3& y) {
  const Point3 d = x - y;
  return 2.0 * d.dot(nu) / d.squaredNorm();
}

// <X_x - X_y, nu_x> from support data, with the O(|y - x|^2) parts formed by
// half-angle sines instead of differences of nearby numbers.
double normal_gap(BodyMode mode, double theta_x, double h_x, double theta_y, double phi_y, double h_y,
                  double dh_y) {
  const double delta = theta_y - theta_x;
  const double sd = std::sin(0.5 * delta);
  const double one_minus_cos = 2.0 * sd * sd;
  double gap = (h_x - h_y) + h_y * one_minus_cos + dh_y * std::sin(delta);
  if (mode == BodyMode::Axisymmetric) {
    const double sp = std::sin(0.5 * phi_y);
    const double az = 2.0 * sp * sp * std::sin(theta_x);
    gap += az * (h_y * std::sin(theta_y) + dh_y * std::cos(theta_y));
  }
  return gap;
}

double wrap_angle(double theta) {
  double t = std::fmod(theta, 2 * pi);
  if (t < 0) t += 2 * pi;
  return t;
}

int nearest_index(const SpectralGrid& g, double theta) {
  if (g.mode() == BodyMode::Curve) {
    const int j = static_cast<int>(std::lround(wrap_angle(theta) / g.spacing()));
    return j % g.size();
  }
  return std::clamp(static_cast<int>(std::lround(theta / g.spacing())), 0, g.size() - 1);
}

}  // namespace

ConvexBody::ConvexBody(BodyMode mode, Eigen::VectorXd h, double t, Point3 offset)
    : grid_(SpectralGrid::get(mode, static_cast<int>(h.size()))), h_(std::move(h)), t_(t), offset_(offset) {
  if (!h_.allFinite()) throw DomainError("support function has non-finite samples");
  const int n = size();
  const Eigen::VectorXd d = grid_->derivative_stack() * h_;
  dh_ = d.head(n);
  ddh_ = d.tail(n);
  r1_ = ddh_ + h_;
  if (mode == BodyMode::Axisymmetric) {
    r2_.resize(n);
    const auto& th = grid_->theta();
    for (int j = 0; j < n; ++j) r2_(j) = (j == 0 || j == n - 1) ? r1_(j) : dh_(j) / std::tan(th(j)) + h_(j);
  }
  coeffs_ = std::make_shared<Eigen::VectorXd>(grid_->coefficients(h_));
}

const Eigen::VectorXd& ConvexBody::coefficients() const { return *coeffs_; }

double ConvexBody::min_radius() const {
  double m = r1_.minCoeff();
  if (r2_.size() > 0) m = std::min(m, r2_.minCoeff());
  return m;
}

double ConvexBody::max_radius() const {
  double m = r1_.maxCoeff();
  if (r2_.size() > 0) m = std::max(m, r2_.maxCoeff());
  return m;
}

Point3 direction(BodyMode mode, double theta, double phi) {
  if (mode == BodyMode::Curve) return Point3(std::cos(theta), std::sin(theta), 0.0);
  const double s = std::sin(theta);
  return Point3(s * std::cos(phi), s * std::sin(phi), std::cos(theta));
}

Point3 ConvexBody::normal(int j) const { return direction(mode(), grid_->theta()(j)); }

Point3 ConvexBody::point(int j) const {
  const double th = grid_->theta()(j);
  const double c = std::cos(th), s = std::sin(th);
  if (mode() == BodyMode::Curve) return Point3(h_(j) * c - dh_(j) * s, h_(j) * s + dh_(j) * c, 0.0);
  return Point3(h_(j) * s + dh_(j) * c, 0.0, h_(j) * c - dh_(j) * s);
}

void ConvexBody::check_convex() const {
  for (int j = 0; j < size(); ++j) {
    if (!(r1_(j) > 0) || (r2_.size() > 0 && !(r2_(j) > 0)))
      throw ConvexityLost("principal radius <= 0 at grid index " + std::to_string(j), j);
  }
}

ConvexBody ConvexBody::with_h(Eigen::VectorXd h, double t) const { return ConvexBody(mode(), std::move(h), t, offset_); }

ConvexBody ConvexBody::at_time(double t) const { return ConvexBody(mode(), h_, t, offset_); }

ConvexBody ConvexBody::scaled(double s) const {
  if (!(s > 0)) throw DomainError("scale factor must be positive");
  return ConvexBody(mode(), s * h_, t_, s * offset_);
}

ConvexBody ConvexBody::translated(const Point3& v) const {
  if (mode() == BodyMode::Axisymmetric && (v.x() != 0.0 || v.y() != 0.0))
    throw DomainError("axisymmetric bodies only translate along the axis");
  Eigen::VectorXd h = h_;
  for (int j = 0; j < size(); ++j) h(j) += v.dot(normal(j));
  return ConvexBody(mode(), std::move(h), t_, offset_);
}

ConvexBody ConvexBody::recentered(const Point3& center) const {
  const Point3 c = center - offset_;
  if (mode() == BodyMode::Axisymmetric && (c.x() != 0.0 || c.y() != 0.0))
    throw DomainError("axisymmetric bodies recenter along the axis only");
  Eigen::VectorXd h = h_;
  for (int j = 0; j < size(); ++j) h(j) -= c.dot(normal(j));
  return ConvexBody(mode(), std::move(h), t_, center);
}

ConvexBody ConvexBody::resampled(int n) const {
  const auto g = SpectralGrid::get(mode(), n);
  Eigen::VectorXd h(n);
  for (int j = 0; j < n; ++j) h(j) = grid_->evaluate(*coeffs_, g->theta()(j)).h;
  return ConvexBody(mode(), std::move(h), t_, offset_);
}

ConvexBody sphere(BodyMode mode, int n, double radius) {
  return ConvexBody(mode, Eigen::VectorXd::Constant(n, radius));
}

ConvexBody from_support_function(BodyMode mode, int n, const std::function<double(double)>& h) {
  const auto g = SpectralGrid::get(mode, n);
  Eigen::VectorXd v(n);
  for (int j = 0; j < n; ++j) v(j) = h(g->theta()(j));
  return ConvexBody(mode, std::move(v));
}

ConvexBody ellipse(int n, double a, double b) {
  return from_support_function(BodyMode::Curve, n, [a, b](double t) {
    const double c = std::cos(t), s = std::sin(t);
    return std::sqrt(a * a * c * c + b * b * s * s);
  });
}

ConvexBody ellipsoid(int n, double a, double c) {
  return from_support_function(BodyMode::Axisymmetric, n, [a, c](double t) {
    const double ct = std::cos(t), st = std::sin(t);
    return std::sqrt(a * a * st * st + c * c * ct * ct);
  });
}

ConvexBody random_convex_body(BodyMode mode, int n, std::uint64_t seed) {
  Rng rng = trial_rng(seed, 0xC0DE);
  const int modes = 4;  // k = 2..5
  std::vector<double> ca(modes), cb(modes);
  double weight = 0;
  for (int i = 0; i < modes; ++i) {
    const int k = i + 2;
    ca[i] = uniform(rng, -1, 1);
    cb[i] = mode == BodyMode::Curve ? uniform(rng, -1, 1) : 0.0;
    weight += (k * k + 1.0) * (std::abs(ca[i]) + std::abs(cb[i]));
  }
  const double budget = uniform(rng, 0.1, 0.7);
  for (int i = 0; i < modes; ++i) {
    ca[i] *= budget / weight;
    cb[i] *= budget / weight;
  }
  const double scale = log_uniform(rng, 0.5, 2.0);
  ConvexBody body = from_support_function(mode, n, [&](double t) {
    double h = 1.0;
    for (int i = 0; i < modes; ++i) h += ca[i] * std::cos((i + 2) * t) + cb[i] * std::sin((i + 2) * t);
    return scale * h;
  });
  Point3 v = Point3::Zero();
  if (mode == BodyMode::Curve) {
    v.x() = uniform(rng, -0.5, 0.5);
    v.y() = uniform(rng, -0.5, 0.5);
  } else {
    v.z() = uniform(rng, -0.5, 0.5);
  }
  return body.translated(v);
}

Embedding embed(const ConvexBody& body) {
  body.check_convex();
  const int n = body.size();
  Embedding e;
  e.points.resize(n, 3);
  e.normals.resize(n, 3);
  for (int j = 0; j < n; ++j) {
    e.points.row(j) = (body.point(j) + body.offset()).transpose();
    e.normals.row(j) = body.normal(j).transpose();
  }
  return e;
}

Embedding embed_revolved(const ConvexBody& body, int n_phi) {
  if (body.mode() != BodyMode::Axisymmetric) return embed(body);
  body.check_convex();
  const int n = body.size();
  Embedding e;
  e.points.resize(static_cast<Eigen::Index>(n) * n_phi, 3);
  e.normals.resize(static_cast<Eigen::Index>(n) * n_phi, 3);
  for (int j = 0; j < n; ++j) {
    const Point3 p = body.point(j);
    for (int m = 0; m < n_phi; ++m) {
      const double phi = 2 * pi * m / n_phi;
      const Eigen::Index row = static_cast<Eigen::Index>(j) * n_phi + m;
      e.points.row(row) = (Point3(p.x() * std::cos(phi), p.x() * std::sin(phi), p.z()) + body.offset()).transpose();
      e.normals.row(row) = direction(BodyMode::Axisymmetric, body.grid().theta()(j), phi).transpose();
    }
  }
  return e;
}

Eigen::MatrixXd principal_curvatures(const ConvexBody& body) {
  body.check_convex();
  Eigen::MatrixXd k(body.size(), body.dimension());
  k.col(0) = body.r1().cwiseInverse();
  if (body.dimension() == 2) k.col(1) = body.r2().cwiseInverse();
  return k;
}

double separation_tolerance(const ConvexBody& body, int x) {
  double r = body.r1()(x);
  if (body.dimension() == 2) r = std::max(r, body.r2()(x));
  const double spacing = body.mode() == BodyMode::Curve ? body.grid().spacing() : 2 * pi / body.size();
  return 3.0 * spacing * r;
}

double ball_curvature_pair(const ConvexBody& body, int x, int y, int phi_index) {
  const Point3 px = body.point(x);
  Point3 py = body.point(y);
  if (body.mode() == BodyMode::Axisymmetric) {
    const double phi = 2 * pi * phi_index / body.size();
    py = Point3(py.x() * std::cos(phi), py.x() * std::sin(phi), py.z());
  }
  if ((px - py).norm() < separation_tolerance(body, x))
    throw PairTooClose("pair lies inside the separation band; use the diagonal value");
  return pair_value(px, body.normal(x), py);
}

double ball_curvature_at(const ConvexBody& body, int x, double theta_y, double phi_y) {
  const auto s = body.grid().evaluate(body.coefficients(), theta_y);
  const Surfel y = surfel_at(body, s, theta_y, phi_y);
  const double theta_x = body.grid().theta()(x);
  const double h_x = body.grid().evaluate(body.coefficients(), theta_x).h;
  const double gap = normal_gap(body.mode(), theta_x, h_x, theta_y, phi_y, s.h, s.dh);
  return 2.0 * gap / (body.point(x) - y.x).squaredNorm();
}

namespace {

struct Candidate {
  double value = 0;
  double theta = 0;
  double phi = 0;
  double step_theta = 0;
  double step_phi = 0;
  bool valid = false;
};

// Finds inf (sign = +1) or sup (sign = -1) of k(x, .) over y.
class PairSearch {
 public:
  PairSearch(const ConvexBody& body, int x) : body_(body), x_(x) {
    px_ = body.point(x);
    sep_ = separation_tolerance(body, x);
    cut_ = sep_ / 10.0;
    hx_ = body.grid().evaluate(body.coefficients(), body.grid().theta()(x)).h;
  }

  double sep() const { return sep_; }

  // sign * k, or a penalty when y is within the cutoff
  double objective(double sign, double theta, double phi) const {
    if (body_.mode() == BodyMode::Axisymmetric) {
      theta = std::clamp(theta, 0.0, pi);
      phi = std::clamp(phi, 0.0, pi);
    }
    const auto s = body_.grid().evaluate(body_.coefficients(), theta);
    const Surfel y = surfel_at(body_, s, theta, phi);
    const double d2 = (px_ - y.x).squaredNorm();
    if (d2 < cut_ * cut_) return kPenalty;
    const double gap = normal_gap(body_.mode(), body_.grid().theta()(x_), hx_, theta, phi, s.h, s.dh);
    return sign * 2.0 * gap / d2;
  }

  void band_search(double sign, Candidate& best) const {
    const auto& g = body_.grid();
    const double th = g.theta()(x_);
    const double spacing = g.spacing();
    if (body_.mode() == BodyMode::Curve) {
      const double reach = 4.0 * spacing;
      const int q = 16;
      for (int side = -1; side <= 1; side += 2)
        for (int i = 0; i <= q; ++i) {
          const double s = side * reach * (i + 0.5) / (q + 0.5);
          consider(sign, th + s, 0.0, reach / q, 0.0, best);
        }
      return;
    }
    const double r1 = body_.r1()(x_);
    const double rmax = std::max(r1, body_.r2()(x_));
    const double reach = std::min(pi, 4.0 * spacing * rmax / r1);
    const double rho = std::max(body_.point(x_).x(), 1e-300);
    const double phi_reach = std::min(pi, 4.0 * sep_ / (3.0 * rho));
    const int q = 8;
    for (int a = -q; a <= q; ++a)
      for (int b = 0; b <= q; ++b) {
        const double t = th + reach * a / q;
        if (t < 0 || t > pi) continue;
        consider(sign, t, phi_reach * b / q, reach / q, phi_reach / q, best);
      }
  }

  void consider(double sign, double theta, double phi, double st, double sp, Candidate& best) const {
    const double v = objective(sign, theta, phi);
    if (v >= kPenalty) return;
    if (!best.valid || v < best.value) best = Candidate{v, theta, phi, st, sp, true};
  }

  void polish(double sign, Candidate& c) const {
    if (!c.valid) return;
    const bool surface = body_.mode() == BodyMode::Axisymmetric;
    for (int round = 0; round < (surface ? 3 : 1); ++round) {
      const double phi = c.phi;
      walk(c.theta, c.value, c.step_theta, surface, [&](double tt) { return objective(sign, tt, phi); });
      if (!surface) break;
      const double theta = c.theta;
      walk(c.phi, c.value, c.step_phi, true, [&](double pp) { return objective(sign, theta, pp); });
    }
    if (surface) polish_near_pole(sign, c);
  }

  // (theta, phi) degenerate at the poles: walk in u = r cos phi, v = r sin phi
  // with r the polar distance from the nearer pole.
  void polish_near_pole(double sign, Candidate& c) const {
    const bool north = c.theta < pi / 2;
    const double r = north ? c.theta : pi - c.theta;
    if (r > 4.0 * c.step_theta) return;
    auto at = [&](double u, double v) {
      const double rr = std::hypot(u, v);
      return std::pair{north ? rr : pi - rr, std::atan2(std::abs(v), u)};
    };
    auto value = [&](double u, double v) {
      const auto [t, p] = at(u, v);
      return objective(sign, t, p);
    };
    double u = r * std::cos(c.phi), v = r * std::sin(c.phi), best = c.value;
    for (int round = 0; round < 6; ++round) {
      const double before = best;
      walk(u, best, c.step_theta, false, [&](double uu) { return value(uu, v); });
      walk(v, best, c.step_theta, false, [&](double vv) { return value(u, vv); });
      if (!(best < before)) break;
    }
    if (!(best < c.value)) return;
    std::tie(c.theta, c.phi) = at(u, v);
    c.value = best;
  }

 private:
  // A minimum pressed against the excluded disc around x: locate the edge by
  // bisection rather than to Brent's half-precision tolerance.
  template <class F>
  static void snap_to_cutoff(double& t, double& v, double probe, F&& f) {
    for (int side = -1; side <= 1; side += 2) {
      double in = t, out = t + side * probe;
      if (f(out) < kPenalty) continue;
      for (int i = 0; i < 64 && in != out; ++i) {
        const double mid = 0.5 * (in + out);
        if (mid == in || mid == out) break;
        (f(mid) < kPenalty ? in : out) = mid;
      }
      const double edge = f(in);
      if (edge < v) {
        t = in;
        v = edge;
      }
      return;
    }
  }

  // Brent on [arg - step, arg + step], re-centred while the minimum sits on a
  // free edge of the bracket.
  template <class F>
  static void walk(double& arg, double& value, double step, bool clamp, F&& f) {
    for (int hop = 0; hop < 16; ++hop) {
      double lo = arg - step, hi = arg + step;
      if (clamp) {
        lo = std::max(lo, 0.0);
        hi = std::min(hi, pi);
      }
      auto [t, v] = brent(f, lo, hi);
      snap_to_cutoff(t, v, 1e-6 * step, f);
      if (!(v < value)) return;
      arg = t;
      value = v;
      const double margin = 0.01 * step;
      const bool at_lo = t - lo < margin && !(clamp && lo == 0.0);
      const bool at_hi = hi - t < margin && !(clamp && hi == pi);
      if (!at_lo && !at_hi) return;
    }
  }

  const ConvexBody& body_;
  int x_;
  Point3 px_;
  double hx_;  // interpolant at x, so h(y) - h(x) carries correlated rounding
  double sep_, cut_;
};

}  // namespace

BallCurvatureField ball_curvature_field(const ConvexBody& body, FieldOptions options) {
  const Eigen::MatrixXd kappa = principal_curvatures(body);
  const int n = body.size();
  const bool surface = body.mode() == BodyMode::Axisymmetric;
  const int n_phi = surface ? n / 2 + 1 : 1;  // azimuths in [0, pi]; the rest by reflection
  const double dphi = 2 * pi / n;

  std::vector<double> rho(n), zc(n), half_sin2(n_phi);
  std::vector<Point3> pts(n);
  for (int j = 0; j < n; ++j) {
    pts[j] = body.point(j);
    rho[j] = pts[j].x();
    zc[j] = pts[j].z();
  }
  for (int m = 0; m < n_phi; ++m) {
    const double s = std::sin(0.5 * m * dphi);
    half_sin2[m] = s * s;
  }

  BallCurvatureField f;
  f.lower.resize(n);
  f.upper.resize(n);
  f.kappa_min = kappa.rowwise().minCoeff();
  f.kappa_max = kappa.rowwise().maxCoeff();
  f.lower_witness.resize(n);
  f.upper_witness.resize(n);

  parallel_for(static_cast<std::size_t>(n), [&](std::size_t xi) {
    const int x = static_cast<int>(xi);
    const PairSearch search(body, x);
    const double sep2 = search.sep() * search.sep();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    int lo_j = -1, lo_m = 0, hi_j = -1, hi_m = 0;
    const double sx = std::sin(body.grid().theta()(x)), cx = std::cos(body.grid().theta()(x));
    for (int j = 0; j < n; ++j) {
      for (int m = 0; m < n_phi; ++m) {
        double num, den;
        if (surface) {
          const double dr = rho[x] - rho[j];
          const double dz = zc[x] - zc[j];
          num = (dr + 2.0 * rho[j] * half_sin2[m]) * sx + dz * cx;
          den = dr * dr + 4.0 * rho[x] * rho[j] * half_sin2[m] + dz * dz;
        } else {
          const Point3 d = pts[x] - pts[j];
          num = d.x() * cx + d.y() * sx;
          den = d.squaredNorm();
        }
        if (den < sep2) continue;
        const double k = 2.0 * num / den;
        if (k < lo) {
          lo = k;
          lo_j = j;
          lo_m = m;
        }
        if (k > hi) {
          hi = k;
          hi_j = j;
          hi_m = m;
        }
      }
    }

    const auto& th = body.grid().theta();
    Candidate cmin, cmax;
    if (lo_j >= 0) {
      cmin = Candidate{lo, th(lo_j), lo_m * dphi, body.grid().spacing(), dphi, true};
      cmax = Candidate{-hi, th(hi_j), hi_m * dphi, body.grid().spacing(), dphi, true};
    }
    if (options.polish) {
      Candidate band_min, band_max;
      search.band_search(+1.0, band_min);
      search.band_search(-1.0, band_max);
      search.polish(+1.0, cmin);
      search.polish(-1.0, cmax);
      search.polish(+1.0, band_min);
      search.polish(-1.0, band_max);
      if (band_min.valid && (!cmin.valid || band_min.value < cmin.value)) cmin = band_min;
      if (band_max.valid && (!cmax.valid || band_max.value < cmax.value)) cmax = band_max;
    }

    BallWitness wl, wu;
    double lower = f.kappa_min(x), upper = f.kappa_max(x);
    if (cmin.valid && cmin.value < lower) {
      lower = cmin.value;
      wl = BallWitness{false, nearest_index(body.grid(), cmin.theta),
                       static_cast<int>(std::lround(cmin.phi / dphi)), cmin.theta, cmin.phi};
    } else {
      wl = BallWitness{true, x, 0, th(x), 0.0};
    }
    if (cmax.valid && -cmax.value > upper) {
      upper = -cmax.value;
      wu = BallWitness{false, nearest_index(body.grid(), cmax.theta),
                       static_cast<int>(std::lround(cmax.phi / dphi)), cmax.theta, cmax.phi};
    } else {
      wu = BallWitness{true, x, 0, th(x), 0.0};
    }
    if (!surface) {
      wl.phi_index = wu.phi_index = 0;
    }
    f.lower(x) = lower;
    f.upper(x) = upper;
    f.lower_witness[x] = wl;
    f.upper_witness[x] = wu;
  });
  return f;
}

namespace {

// Directions with support values: the grid plus refined extra directions.
struct SupportSet {
  std::vector<Point3> z;
  std::vector<double> h;
};

double support_gap(const SupportSet& s, const Point3& c) {
  double m = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.z.size(); ++i) m = std::min(m, s.h[i] - c.dot(s.z[i]));
  return m;
}

template <class F>
double golden_max(F&& f, double lo, double hi, double tol, double* arg) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    }
  }
  const double x = 0.5 * (a + b);
  if (arg) *arg = x;
  return f(x);
}

// Continuous minimisers of h(theta) - <c, z(theta)> near the smallest grid values.
std::vector<double> refine_inner_minima(const ConvexBody& body, const Point3& c) {
  const int n = body.size();
  const auto& g = body.grid();
  const bool periodic = body.mode() == BodyMode::Curve;
  Eigen::VectorXd v(n);
  for (int j = 0; j < n; ++j) v(j) = body.h()(j) - c.dot(body.normal(j));
  const double spacing = g.spacing();
  const double margin = spacing * spacing * (body.ddh().cwiseAbs().maxCoeff() + body.h().cwiseAbs().maxCoeff() +
                                              c.norm());
  const double vmin = v.minCoeff();
  std::vector<std::pair<double, int>> local;
  for (int j = 0; j < n; ++j) {
    const double left = (j > 0) ? v(j - 1) : (periodic ? v(n - 1) : v(j + 1));
    const double right = (j < n - 1) ? v(j + 1) : (periodic ? v(0) : v(j - 1));
    if (v(j) <= left && v(j) <= right && v(j) <= vmin + margin) local.emplace_back(v(j), j);
  }
  std::sort(local.begin(), local.end());
  if (local.size() > 8) local.resize(8);
  std::vector<double> out;
  for (const auto& [val, j] : local) {
    double lo = g.theta()(j) - spacing, hi = g.theta()(j) + spacing;
    if (!periodic) {
      lo = std::max(lo, 0.0);
      hi = std::min(hi, pi);
    }
    const auto r = brent(
        [&](double t) {
          const double h = g.evaluate(body.coefficients(), t).h;
          return h - c.dot(direction(body.mode(), t));
        },
        lo, hi);
    out.push_back(r.first);
  }
  return out;
}

Point3 inner_center(const ConvexBody& body, const SupportSet& s) {
  const double reach = body.h().cwiseAbs().maxCoeff();
  const double tol = 1e-13 * (1.0 + reach);
  if (body.mode() == BodyMode::Axisymmetric) {
    double zc = 0;
    golden_max([&](double z) { return support_gap(s, Point3(0, 0, z)); }, -reach, reach, tol, &zc);
    return Point3(0, 0, zc);
  }
  auto best_y = [&](double x, double* y) {
    return golden_max([&](double yy) { return support_gap(s, Point3(x, yy, 0)); }, -reach, reach, tol, y);
  };
  double xc = 0, yc = 0;
  golden_max([&](double x) { return best_y(x, nullptr); }, -reach, reach, tol, &xc);
  best_y(xc, &yc);
  return Point3(xc, yc, 0);
}

}  // namespace

RadiiReport radii(const ConvexBody& body) {
  body.check_convex();
  const int n = body.size();
  const auto& g = body.grid();
  const bool surface = body.mode() == BodyMode::Axisymmetric;
  RadiiReport r;

  // inradius: max_c min_z (h(z) - <c, z>), refined with continuous minimisers
  SupportSet set;
  for (int j = 0; j < n; ++j) {
    set.z.push_back(body.normal(j));
    set.h.push_back(body.h()(j));
  }
  Point3 c = Point3::Zero();
  for (int iter = 0; iter < 3; ++iter) {
    c = inner_center(body, set);
    for (double t : refine_inner_minima(body, c)) {
      set.z.push_back(direction(body.mode(), t));
      set.h.push_back(g.evaluate(body.coefficients(), t).h);
    }
  }
  c = inner_center(body, set);
  r.r_minus = support_gap(set, c);
  r.in_center = c + body.offset();

  // circumradius: smallest enclosing circle of the curve or of the meridian
  // section (profile plus its mirror image), refined at the support points
  std::vector<Eigen::Vector2d> pts;
  std::vector<double> param;
  auto add = [&](double theta) {
    const Surfel s = surfel_at(body, theta, 0.0);
    if (surface) {
      pts.emplace_back(s.x.x(), s.x.z());
      pts.emplace_back(-s.x.x(), s.x.z());
      param.push_back(theta);
      param.push_back(theta);
    } else {
      pts.emplace_back(s.x.x(), s.x.y());
      param.push_back(theta);
    }
  };
  for (int j = 0; j < n; ++j) {
    const Point3 p = body.point(j);
    if (surface) {
      pts.emplace_back(p.x(), p.z());
      pts.emplace_back(-p.x(), p.z());
      param.push_back(g.theta()(j));
      param.push_back(g.theta()(j));
    } else {
      pts.emplace_back(p.x(), p.y());
      param.push_back(g.theta()(j));
    }
  }
  Circle circle = min_enclosing_circle(pts);
  for (int iter = 0; iter < 3; ++iter) {
    const Circle current = circle;
    for (int idx : current.support) {
      const double t0 = param[static_cast<std::size_t>(idx)];
      double lo = t0 - g.spacing(), hi = t0 + g.spacing();
      if (surface) {
        lo = std::max(lo, 0.0);
        hi = std::min(hi, pi);
      }
      const auto best = brent(
          [&](double t) {
            const Surfel s = surfel_at(body, t, 0.0);
            const Eigen::Vector2d q = surface ? Eigen::Vector2d(s.x.x(), s.x.z()) : Eigen::Vector2d(s.x.x(), s.x.y());
            return -(q - current.center).squaredNorm();
          },
          lo, hi);
      add(best.first);
    }
    circle = min_enclosing_circle(pts);
  }
  r.r_plus = circle.radius;
  r.circ_center = surface ? Point3(0, 0, circle.center.y()) : Point3(circle.center.x(), circle.center.y(), 0);
  r.circ_center += body.offset();
  return r;
}

double hausdorff_to_unit_sphere(const ConvexBody& body, const Point3& center) {
  const Point3 c = center - body.offset();
  const int n = body.size();
  const int n_phi = body.mode() == BodyMode::Axisymmetric ? n : 1;
  double worst = 0;
  for (int j = 0; j < n; ++j) {
    for (int m = 0; m < n_phi; ++m) {
      const double phi = 2 * pi * m / n_phi;
      const double gap = body.h()(j) - c.dot(direction(body.mode(), body.grid().theta()(j), phi));
      if (!(gap > 0)) throw CenterOutside("center is not interior to the body");
      worst = std::max(worst, std::abs(gap - 1.0));
    }
  }
  return worst;
}

double tangent_plane_diagnostic(const ConvexBody& body, const BallCurvatureField& field, int x) {
  const BallWitness& w = field.lower_witness.at(static_cast<std::size_t>(x));
  if (w.diagonal) throw DiagonalWitness("the lower ball curvature is attained on the diagonal");
  const Point3 px = body.point(x);
  const Point3 nu = body.normal(x);
  const Surfel y = surfel_at(body, w.theta, w.phi);
  const Point3 diff = px - y.x;
  const double d = diff.norm();
  const Point3 unit = diff / d;
  const Point3 v = nu - field.lower(x) * d * unit;
  const double vn = v.norm();
  std::vector<Point3> tangents;
  if (body.mode() == BodyMode::Curve) {
    tangents.emplace_back(-std::sin(w.theta), std::cos(w.theta), 0.0);
  } else {
    tangents.emplace_back(std::cos(w.theta) * std::cos(w.phi), std::cos(w.theta) * std::sin(w.phi),
                          -std::sin(w.theta));
    tangents.emplace_back(-std::sin(w.phi), std::cos(w.phi), 0.0);
  }
  double res = 0;
  for (const auto& e : tangents) res = std::max(res, std::abs(e.dot(v)) / vn);
  return res;
}

}  // namespace noncollapse
