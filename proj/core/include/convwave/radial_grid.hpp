#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace convwave {

enum class GridKind { Uniform, GaussPanels };

/// One quadrature panel [lo, hi] carrying `points` Gauss-Legendre nodes.
/// points == 1 degenerates to the midpoint rule, handy for planting a
/// sample node at a prescribed radius.
struct PanelSpec {
  double lo = 0.0;
  double hi = 0.0;
  int points = 0;
};

/// Radial sample points on a truncated domain [0, r_max] together with
/// quadrature weights.  plain_weights() integrate f -> int f(rho) drho;
/// weights() carry the extra measure factor rho, the form every radial
/// integral here takes.  Nodes are strictly increasing and nonnegative.
class RadialGrid {
public:
  GridKind kind() const { return kind_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return rho_weights_; }
  const std::vector<double>& plain_weights() const { return plain_weights_; }
  std::size_t size() const { return nodes_.size(); }
  double r_max() const { return edges_.back(); }
  double r_min() const { return edges_.front(); }

  /// Node spacing; only meaningful for Uniform grids.
  double spacing() const;

  std::size_t panel_count() const { return edges_.size() - 1; }
  double panel_lo(std::size_t p) const { return edges_[p]; }
  double panel_hi(std::size_t p) const { return edges_[p + 1]; }
  std::size_t panel_begin(std::size_t p) const;
  std::size_t panel_end(std::size_t p) const;

  /// Piecewise interpolation of nodal samples: linear between nodes for
  /// Uniform grids, barycentric Lagrange within the owning panel for
  /// GaussPanels.  x beyond r_max evaluates to 0.
  double interpolate(std::span<const double> values, double x) const;

  bool same_layout(const RadialGrid& other) const;

  /// Grid scaled by `factor` in radius (nodes, edges, weights follow).
  RadialGrid scaled(double factor) const;

  /// Uniform nodes 0, dr, 2 dr, ..., r_max (r_max snapped to a multiple
  /// of dr); trapezoidal weights.
  static RadialGrid uniform(double dr, double r_max);

  static RadialGrid gauss_panels(const std::vector<PanelSpec>& panels);
  static RadialGrid gauss_panels(double lo, double hi, std::size_t n_panels,
                                 int points_per_panel);

private:
  GridKind kind_ = GridKind::Uniform;
  std::vector<double> nodes_;
  std::vector<double> plain_weights_;
  std::vector<double> rho_weights_;
  std::vector<double> edges_;                // panel_count()+1 entries
  std::vector<std::size_t> panel_offsets_;   // panel_count()+1 entries
  double dr_ = 0.0;                          // Uniform only

  std::size_t locate_panel(double x) const;
};

using GridPtr = std::shared_ptr<const RadialGrid>;

inline GridPtr make_grid(RadialGrid g) {
  return std::make_shared<const RadialGrid>(std::move(g));
}

}
