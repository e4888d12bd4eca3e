#include "convwave/fields.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace convwave {

RadialField::RadialField(GridPtr g, std::vector<double> v, double t)
    : grid(std::move(g)), values(std::move(v)), time(t) {
  if (!grid) throw std::invalid_argument("RadialField: null grid");
  if (values.size() != grid->size())
    throw std::invalid_argument("RadialField: value count does not match grid");
}

double RadialField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

RadialField RadialField::sample(GridPtr g, const std::function<double(double)>& f,
                                double t) {
  std::vector<double> v(g->size());
  for (std::size_t i = 0; i < g->size(); ++i) v[i] = f(g->nodes()[i]);
  return RadialField(std::move(g), std::move(v), t);
}

double SpaceTimeField::eval(double r, double t) const {
  if (times.empty()) throw std::logic_error("SpaceTimeField: no frames");
  if (t <= times.front()) return grid->interpolate(frames.front(), r);
  if (t >= times.back()) return grid->interpolate(frames.back(), r);
  auto it = std::upper_bound(times.begin(), times.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - times.begin());
  std::size_t lo = hi - 1;
  double w = (t - times[lo]) / (times[hi] - times[lo]);
  return (1.0 - w) * grid->interpolate(frames[lo], r) +
         w * grid->interpolate(frames[hi], r);
}

double SpaceTimeField::max_abs() const {
  double m = 0.0;
  for (const auto& fr : frames)
    for (double v : fr) m = std::max(m, std::abs(v));
  return m;
}

SpaceTimeField SpaceTimeField::sample(
    GridPtr g, std::vector<double> times,
    const std::function<double(double, double)>& f) {
  SpaceTimeField out;
  out.grid = std::move(g);
  out.times = std::move(times);
  out.frames.resize(out.times.size());
  for (std::size_t l = 0; l < out.times.size(); ++l) {
    out.frames[l].resize(out.grid->size());
    for (std::size_t i = 0; i < out.grid->size(); ++i)
      out.frames[l][i] = f(out.grid->nodes()[i], out.times[l]);
  }
  return out;
}

SpaceTimeField SpaceTimeField::zeros(GridPtr g, std::vector<double> times) {
  SpaceTimeField out;
  out.grid = std::move(g);
  out.times = std::move(times);
  out.frames.assign(out.times.size(), std::vector<double>(out.grid->size(), 0.0));
  return out;
}

}
