#include "convwave/radial_grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "convwave/quadrature.hpp"

namespace convwave {

double RadialGrid::spacing() const {
  if (kind_ != GridKind::Uniform)
    throw std::logic_error("spacing() requires a Uniform grid");
  return dr_;
}

std::size_t RadialGrid::panel_begin(std::size_t p) const {
  return kind_ == GridKind::Uniform ? p : panel_offsets_[p];
}

std::size_t RadialGrid::panel_end(std::size_t p) const {
  return kind_ == GridKind::Uniform ? p + 2 : panel_offsets_[p + 1];
}

std::size_t RadialGrid::locate_panel(double x) const {
  auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  if (it == edges_.begin()) return 0;
  std::size_t p = static_cast<std::size_t>(it - edges_.begin()) - 1;
  return std::min(p, panel_count() - 1);
}

double RadialGrid::interpolate(std::span<const double> values, double x) const {
  if (values.size() != nodes_.size())
    throw std::invalid_argument("interpolate: value count does not match grid");
  if (x > r_max() || x < r_min()) return 0.0;

  if (kind_ == GridKind::Uniform) {
    double pos = x / dr_;
    auto i = static_cast<std::size_t>(pos);
    if (i + 1 >= nodes_.size()) return values.back();
    double w = pos - static_cast<double>(i);
    return (1.0 - w) * values[i] + w * values[i + 1];
  }

  std::size_t p = locate_panel(x);
  std::size_t lo = panel_begin(p), hi = panel_end(p);
  std::size_t q = hi - lo;
  if (q == 1) return values[lo];

  // Barycentric Lagrange through the panel's nodes.
  double num = 0.0, den = 0.0;
  double scale = panel_hi(p) - panel_lo(p);
  for (std::size_t k = lo; k < hi; ++k) {
    double diff = x - nodes_[k];
    if (diff == 0.0) return values[k];
    double w = 1.0;
    for (std::size_t j = lo; j < hi; ++j)
      if (j != k) w *= scale / (nodes_[k] - nodes_[j]);
    w /= diff;
    num += w * values[k];
    den += w;
  }
  return num / den;
}

bool RadialGrid::same_layout(const RadialGrid& other) const {
  return kind_ == other.kind_ && nodes_ == other.nodes_ && edges_ == other.edges_;
}

RadialGrid RadialGrid::scaled(double factor) const {
  if (!(factor > 0.0)) throw std::invalid_argument("scaled: factor must be positive");
  RadialGrid g = *this;
  for (double& v : g.nodes_) v *= factor;
  for (double& v : g.edges_) v *= factor;
  for (double& v : g.plain_weights_) v *= factor;
  // rho-weights pick up factor^2: one power from dr, one from the node.
  for (double& v : g.rho_weights_) v *= factor * factor;
  g.dr_ *= factor;
  return g;
}

RadialGrid RadialGrid::uniform(double dr, double r_max) {
  if (!(dr > 0.0) || !(r_max > dr))
    throw std::invalid_argument("uniform grid needs 0 < dr < r_max");
  auto intervals = static_cast<std::size_t>(std::llround(r_max / dr));
  if (intervals < 2) intervals = 2;

  RadialGrid g;
  g.kind_ = GridKind::Uniform;
  g.dr_ = dr;
  g.nodes_.resize(intervals + 1);
  g.edges_.resize(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) {
    g.nodes_[i] = static_cast<double>(i) * dr;
    g.edges_[i] = g.nodes_[i];
  }
  g.plain_weights_.assign(intervals + 1, dr);
  g.plain_weights_.front() = 0.5 * dr;
  g.plain_weights_.back() = 0.5 * dr;
  g.rho_weights_.resize(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i)
    g.rho_weights_[i] = g.plain_weights_[i] * g.nodes_[i];
  return g;
}

RadialGrid RadialGrid::gauss_panels(const std::vector<PanelSpec>& panels) {
  if (panels.empty()) throw std::invalid_argument("gauss_panels: no panels");
  RadialGrid g;
  g.kind_ = GridKind::GaussPanels;
  g.panel_offsets_.push_back(0);
  for (const auto& p : panels) {
    if (!(p.lo >= 0.0) || !(p.hi > p.lo) || p.points < 1)
      throw std::invalid_argument("gauss_panels: bad panel");
    if (g.edges_.empty()) g.edges_.push_back(p.lo);
    else if (p.lo != g.edges_.back())
      throw std::invalid_argument("gauss_panels: panels must be contiguous");
    const GaussRule& rule = gauss_legendre(p.points);
    double mid = 0.5 * (p.lo + p.hi), half = 0.5 * (p.hi - p.lo);
    for (int k = 0; k < p.points; ++k) {
      double x = mid + half * rule.nodes[k];
      g.nodes_.push_back(x);
      g.plain_weights_.push_back(half * rule.weights[k]);
      g.rho_weights_.push_back(half * rule.weights[k] * x);
    }
    g.edges_.push_back(p.hi);
    g.panel_offsets_.push_back(g.nodes_.size());
  }
  for (std::size_t i = 1; i < g.nodes_.size(); ++i)
    if (!(g.nodes_[i] > g.nodes_[i - 1]))
      throw std::invalid_argument("gauss_panels: nodes not strictly increasing");
  return g;
}

RadialGrid RadialGrid::gauss_panels(double lo, double hi, std::size_t n_panels,
                                    int points_per_panel) {
  std::vector<PanelSpec> panels;
  panels.reserve(n_panels);
  double w = (hi - lo) / static_cast<double>(n_panels);
  for (std::size_t p = 0; p < n_panels; ++p)
    panels.push_back({lo + w * static_cast<double>(p),
                      lo + w * static_cast<double>(p + 1), points_per_panel});
  return gauss_panels(panels);
}

}
