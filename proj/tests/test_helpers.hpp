#pragma once

#include "fchoq/model.hpp"

#include <random>

// shared fixtures: the standard double-well scenario at selectable resolution

namespace fchoq::testing {

inline ModelConfig standard_config(int n, double eps = 0.25,
                                   double half_length = 12.0) {
  ModelConfig m;
  m.grid = make_grid(1, half_length, n);
  m.s = 0.4;
  m.mu = 0.5;
  m.q = 3.0;
  m.eps = eps;
  m.potential.family = PotentialFamily::product_well;
  m.potential.base = 1.0;
  m.potential.amplitude = 2.0;
  m.potential.sigma = 1.0;
  Point w1(1), w2(1);
  w1[0] = -2.0;
  w2[0] = 2.0;
  m.potential.wells = {w1, w2};
  m.lambda_region.shape = RegionShape::box;
  m.lambda_region.center = Point::Zero(1);
  m.lambda_region.extents = Point::Constant(1, 4.0);
  return validate_config(std::move(m));
}

inline Field random_field(const GridSpec& g, std::mt19937_64& rng,
                          double amp = 1.0) {
  std::normal_distribution<double> dist;
  Array v(g.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = amp * dist(rng);
  return Field{g, std::move(v)};
}

inline Field smooth_bump(const GridSpec& g, double center, double width,
                         double amp) {
  return sample_field(g, [&](const Point& x) {
    const double d = (x[0] - center) / width;
    return amp * std::exp(-d * d);
  });
}

}  // namespace fchoq::testing
