#pragma once

#include <vector>

#include <Eigen/Dense>

namespace noncollapse {

struct Circle {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 0;
  std::vector<int> support;  // indices of the points on the boundary
};

/// Smallest enclosing circle of a planar point set (Welzl, expected linear
/// time). The permutation is drawn from a fixed seed, so results are
/// reproducible.
Circle min_enclosing_circle(const std::vector<Eigen::Vector2d>& points);

}  // namespace noncollapse
