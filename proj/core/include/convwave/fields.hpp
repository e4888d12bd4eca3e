#pragma once

#include <functional>
#include <vector>

#include "convwave/radial_grid.hpp"

namespace convwave {

/// Radial profile sampled on a grid at one instant.
struct RadialField {
  GridPtr grid;
  std::vector<double> values;
  double time = 0.0;

  RadialField() = default;
  RadialField(GridPtr g, std::vector<double> v, double t = 0.0);

  double operator()(double r) const { return grid->interpolate(values, r); }
  double max_abs() const;

  static RadialField sample(GridPtr g, const std::function<double(double)>& f,
                            double t = 0.0);
};

/// Radial profile sampled on a grid at uniformly listed times; linear
/// interpolation in t, grid interpolation in r.
struct SpaceTimeField {
  GridPtr grid;
  std::vector<double> times;                 // strictly increasing
  std::vector<std::vector<double>> frames;   // frames[l][i]

  double eval(double r, double t) const;
  double max_abs() const;

  static SpaceTimeField sample(GridPtr g, std::vector<double> times,
                               const std::function<double(double, double)>& f);
  static SpaceTimeField zeros(GridPtr g, std::vector<double> times);
};

}
