#include "noncollapse/miniball.hpp"

#include <algorithm>
#include <numeric>
#include <random>

#include "noncollapse/error.hpp"

namespace noncollapse {
namespace {

using P = Eigen::Vector2d;

Circle from_two(const P& a, const P& b, int ia, int ib) {
  Circle c;
  c.center = 0.5 * (a + b);
  c.radius = 0.5 * (a - b).norm();
  c.support = {ia, ib};
  return c;
}

Circle from_three(const P& a, const P& b, const P& p, int ia, int ib, int ip) {
  const P ab = b - a;
  const P ap = p - a;
  const double d = 2.0 * (ab.x() * ap.y() - ab.y() * ap.x());
  if (std::abs(d) < 1e-300) {
    // collinear: the farthest pair spans the circle
    Circle c = from_two(a, b, ia, ib);
    const Circle c2 = from_two(a, p, ia, ip);
    const Circle c3 = from_two(b, p, ib, ip);
    if (c2.radius > c.radius) c = c2;
    if (c3.radius > c.radius) c = c3;
    return c;
  }
  const double b2 = ab.squaredNorm();
  const double p2 = ap.squaredNorm();
  const P off((ap.y() * b2 - ab.y() * p2) / d, (ab.x() * p2 - ap.x() * b2) / d);
  Circle c;
  c.center = a + off;
  c.radius = off.norm();
  c.support = {ia, ib, ip};
  return c;
}

bool outside(const Circle& c, const P& p) {
  return (p - c.center).norm() > c.radius * (1.0 + 1e-14) + 1e-300;
}

}  // namespace

Circle min_enclosing_circle(const std::vector<Eigen::Vector2d>& pts) {
  if (pts.empty()) throw DomainError("min_enclosing_circle: empty point set");
  std::vector<int> order(pts.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(0x5eed);
  std::shuffle(order.begin(), order.end(), rng);

  Circle c;
  c.center = pts[order[0]];
  c.support = {order[0]};
  for (std::size_t i = 1; i < order.size(); ++i) {
    const int pi = order[i];
    if (!outside(c, pts[pi])) continue;
    c.center = pts[pi];
    c.radius = 0;
    c.support = {pi};
    for (std::size_t j = 0; j < i; ++j) {
      const int pj = order[j];
      if (!outside(c, pts[pj])) continue;
      c = from_two(pts[pi], pts[pj], pi, pj);
      for (std::size_t k = 0; k < j; ++k) {
        const int pk = order[k];
        if (!outside(c, pts[pk])) continue;
        c = from_three(pts[pi], pts[pj], pts[pk], pi, pj, pk);
      }
    }
  }
  return c;
}

}  // namespace noncollapse
