#include "oracles.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace oracle {

using std::numbers::pi;

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

double sigma_subsets(const Vec& z, int k) {
  const int n = static_cast<int>(z.size());
  if (k == 0) return 1;
  double total = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != k) continue;
    double p = 1;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) p *= z(i);
    total += p;
  }
  return total;
}

double speed_formula(const std::string& spec, const Vec& z) {
  const auto n = static_cast<double>(z.size());
  const int ni = static_cast<int>(z.size());
  if (spec == "mean") return z.sum() / n;
  if (spec == "harmonic") return n / z.cwiseInverse().sum();
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = spec.substr(colon + 1);
  if (head == "power") {
    const double p = std::stod(arg);
    if (p == 0) return std::exp(z.array().log().sum() / n);
    return std::pow(z.array().pow(p).sum() / n, 1.0 / p);
  }
  const int k = std::stoi(arg);
  if (head == "sigma-ratio") {
    const double norm = binomial(ni, k - 1) / binomial(ni, k);
    return norm * sigma_subsets(z, k) / sigma_subsets(z, k - 1);
  }
  if (head == "sigma-root") return std::pow(sigma_subsets(z, k) / binomial(ni, k), 1.0 / k);
  throw std::invalid_argument("unknown speed " + spec);
}

Vec fd_gradient(const Fn& f, const Vec& z, double h) {
  Vec g(z.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(z(i)));
    Vec a = z, b = z;
    a(i) += step;
    b(i) -= step;
    g(i) = (f(a) - f(b)) / (2 * step);
  }
  return g;
}

Mat fd_hessian(const Fn& f, const Vec& z, double h) {
  const auto n = z.size();
  Mat H(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double si = h * std::max(1.0, std::abs(z(i)));
      const double sj = h * std::max(1.0, std::abs(z(j)));
      Vec pp = z, pm = z, mp = z, mm = z;
      pp(i) += si;
      pp(j) += sj;
      pm(i) += si;
      pm(j) -= sj;
      mp(i) -= si;
      mp(j) += sj;
      mm(i) -= si;
      mm(j) -= sj;
      H(i, j) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * si * sj);
    }
  }
  return 0.5 * (H + H.transpose());
}

double q_reference(const std::string& spec, const Vec& a, const Vec& z, double k) {
  const Fn f = [&](const Vec& x) { return speed_formula(spec, x); };
  const Vec g = fd_gradient(f, a, 1e-6 * a.minCoeff());
  double q = f(z) - f(a);
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double s = a(i) - k;
    q -= g(i) * (s - s * s / (z(i) - k));
  }
  return q;
}

double ellipse_parameter(double a, double b, double theta) {
  return std::atan2(b * std::sin(theta), a * std::cos(theta));
}

double ellipse_curvature(double a, double b, double t) {
  const double s = std::sin(t), c = std::cos(t);
  return a * b / std::pow(a * a * s * s + b * b * c * c, 1.5);
}

Eigen::Vector2d ellipse_point(double a, double b, double t) { return {a * std::cos(t), b * std::sin(t)}; }

SpheroidCurvatures spheroid_curvatures(double a, double c, double theta) {
  const double t = std::atan2(a * std::sin(theta), c * std::cos(theta));
  const double phi = 0.3;  // any azimuth
  const double st = std::sin(t), ct = std::cos(t), sp = std::sin(phi), cp = std::cos(phi);
  const Eigen::Vector3d pt(a * ct * cp, a * ct * sp, -c * st);
  const Eigen::Vector3d pp(-a * st * sp, a * st * cp, 0);
  const Eigen::Vector3d ptt(-a * st * cp, -a * st * sp, -c * ct);
  const Eigen::Vector3d ppp(-a * st * cp, -a * st * sp, 0);
  const Eigen::Vector3d ptp(-a * ct * sp, a * ct * cp, 0);
  Eigen::Vector3d nu = pt.cross(pp);
  const Eigen::Vector3d pos(a * st * cp, a * st * sp, c * ct);
  if (nu.dot(pos) < 0) nu = -nu;
  nu.normalize();
  const double E = pt.dot(pt), F = pt.dot(pp), G = pp.dot(pp);
  // second fundamental form with respect to the inward normal, so convex = positive
  const double L = -ptt.dot(nu), M = -ptp.dot(nu), N = -ppp.dot(nu);
  // shape operator I^{-1} II
  Eigen::Matrix2d I, II;
  I << E, F, F, G;
  II << L, M, M, N;
  const Eigen::Matrix2d S = I.inverse() * II;
  return {S(0, 0), S(1, 1)};
}

double pair_curvature(const Eigen::Vector3d& x, const Eigen::Vector3d& nu, const Eigen::Vector3d& y) {
  const Eigen::Vector3d d = x - y;
  return 2.0 * d.dot(nu) / d.squaredNorm();
}

PairExtrema exhaustive_pairs(const std::vector<Eigen::Vector3d>& points, const Eigen::Vector3d& x,
                             const Eigen::Vector3d& nu, double sep) {
  PairExtrema e;
  e.lower = std::numeric_limits<double>::infinity();
  e.upper = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i) {
    if ((points[i] - x).norm() <= sep) continue;
    const double k = pair_curvature(x, nu, points[i]);
    if (k < e.lower) {
      e.lower = k;
      e.argmin = static_cast<int>(i);
    }
    if (k > e.upper) {
      e.upper = k;
      e.argmax = static_cast<int>(i);
    }
  }
  return e;
}

namespace {

bool covers(const Circle& c, const std::vector<Eigen::Vector2d>& pts) {
  for (const auto& p : pts)
    if ((p - c.center).norm() > c.radius * (1 + 1e-12) + 1e-12) return false;
  return true;
}

}  // namespace

Circle brute_force_circle(const std::vector<Eigen::Vector2d>& pts) {
  Circle best{Eigen::Vector2d::Zero(), std::numeric_limits<double>::infinity()};
  const std::size_t n = pts.size();
  if (n == 1) return {pts[0], 0};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      Circle c{0.5 * (pts[i] + pts[j]), 0.5 * (pts[i] - pts[j]).norm()};
      if (c.radius < best.radius && covers(c, pts)) best = c;
      for (std::size_t k = j + 1; k < n; ++k) {
        const Eigen::Vector2d a = pts[i], b = pts[j], d = pts[k];
        const double D = 2 * (a.x() * (b.y() - d.y()) + b.x() * (d.y() - a.y()) + d.x() * (a.y() - b.y()));
        if (std::abs(D) < 1e-14) continue;
        const double ux = (a.squaredNorm() * (b.y() - d.y()) + b.squaredNorm() * (d.y() - a.y()) +
                           d.squaredNorm() * (a.y() - b.y())) / D;
        const double uy = (a.squaredNorm() * (d.x() - b.x()) + b.squaredNorm() * (a.x() - d.x()) +
                           d.squaredNorm() * (b.x() - a.x())) / D;
        Circle cc{{ux, uy}, (a - Eigen::Vector2d(ux, uy)).norm()};
        if (cc.radius < best.radius && covers(cc, pts)) best = cc;
      }
    }
  }
  return best;
}

double support(const std::vector<Eigen::Vector3d>& points, const Eigen::Vector3d& u) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) best = std::max(best, p.dot(u));
  return best;
}

std::vector<double> periodic_derivative(const std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<double> out(n, 0.0);
  for (int k = 1; k <= n / 2; ++k) {
    double a = 0, b = 0;
    for (int j = 0; j < n; ++j) {
      const double th = 2 * pi * j / n;
      a += v[j] * std::cos(k * th);
      b += v[j] * std::sin(k * th);
    }
    a *= 2.0 / n;
    b *= 2.0 / n;
    if (2 * k == n) continue;  // the Nyquist mode has no derivative on the grid
    for (int j = 0; j < n; ++j) {
      const double th = 2 * pi * j / n;
      out[j] += k * (-a * std::sin(k * th) + b * std::cos(k * th));
    }
  }
  return out;
}

double support_area(const std::vector<double>& h) {
  const std::vector<double> dh = periodic_derivative(h);
  double s = 0;
  for (std::size_t j = 0; j < h.size(); ++j) s += h[j] * h[j] - dh[j] * dh[j];
  return 0.5 * s * 2 * pi / static_cast<double>(h.size());
}

}  // namespace oracle
