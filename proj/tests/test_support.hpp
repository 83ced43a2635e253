#pragma once

#include <random>

#include "koiter/geometry.hpp"

namespace koiter::test {

inline Vec2 random_point(const ParamRect& r, std::mt19937_64& rng, double margin = 0.02) {
  std::uniform_real_distribution<double> u(margin, 1.0 - margin);
  return {r.y1min + u(rng) * r.width(), r.y2min + u(rng) * r.height()};
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace koiter::test
