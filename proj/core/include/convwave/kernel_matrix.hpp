#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "convwave/fields.hpp"
#include "convwave/radial_grid.hpp"

namespace convwave {

struct KernelSettings {
  /// Rule size for the inner eta-integral (dimensions other than 3,
  /// where no closed form exists).
  int eta_points = 48;
  /// Gauss points per graded slice next to the diagonal.
  int near_points = 20;
  /// Geometric bisection depth toward the singular radius.
  int graded_levels = 34;
  /// Near-diagonal panels whose self-estimated error exceeds this
  /// (relative) are counted in diagnostics().flagged_panels.
  double panel_error_tol = 1e-8;
  bool operator==(const KernelSettings&) const = default;
};

struct KernelDiagnostics {
  /// Entries that came out of quadrature slightly negative and were
  /// clamped to zero, and the largest magnitude among them.
  std::uint64_t clamped_entries = 0;
  double max_clamped = 0.0;
  /// Near-singular panels whose error estimate exceeded panel_error_tol.
  std::uint64_t flagged_panels = 0;
};

/// Dense quadrature realization of the radial convolution operator:
/// (apply(U))[i] ~ (V_gamma * U)(r_i) for U sampled on the grid, where
/// V_gamma = |x|^{-gamma} in R^n. Entries are nonnegative; negatives
/// arising from quadrature are clamped to zero and counted.
///
/// The integral over the source radius runs to infinity in the continuum;
/// here it is truncated at grid r_max. For U bounded by
/// amp*(1+rho)^{-(1+nu)} beyond r_max the neglected tail is at most
/// amp * omega_n * int_{r_max}^inf rho^{n-1-gamma}(1+rho)^{-2(1+nu)} drho
/// at the worst point r = 0 (the kernel only decays away from it), finite
/// whenever 2+2nu > n-gamma, the regime this code targets.
class KernelMatrix {
 public:
  /// n >= 2, 0 < gamma < n. Construction parallelizes over rows
  /// (deterministically; see parallel.hpp for worker control).
  static KernelMatrix build(GridPtr grid, int n, double gamma,
                            const KernelSettings& settings = {});

  /// Half-line variant used by the 1-D solver: kernel
  /// |x-z|^{-gamma} + (x+z)^{-gamma} against plain dz measure,
  /// 0 < gamma < 1.
  static KernelMatrix build_line(GridPtr grid, double gamma,
                                 const KernelSettings& settings = {});

  /// Loads from cache_dir when a file with the matching content key
  /// exists, otherwise builds and stores. Hits are bit-identical to
  /// recomputation. n == 1 routes to build_line.
  static KernelMatrix build_cached(GridPtr grid, int n, double gamma,
                                   const KernelSettings& settings,
                                   const std::filesystem::path& cache_dir);

  RadialField apply(const RadialField& U) const;

  double entry(std::size_t i, std::size_t j) const {
    return entries_[i * size_ + j];
  }
  std::size_t size() const { return size_; }
  const GridPtr& grid() const { return grid_; }
  int dimension() const { return n_; }
  double gamma() const { return gamma_; }
  const KernelSettings& settings() const { return settings_; }
  const KernelDiagnostics& diagnostics() const { return diag_; }

  /// FNV-1a hash of (grid layout, n, gamma, quadrature settings); the
  /// cache file name and handshake.
  std::uint64_t content_key() const;

  void save(const std::filesystem::path& file) const;
  static std::optional<KernelMatrix> load(const std::filesystem::path& file,
                                          GridPtr grid, int n, double gamma,
                                          const KernelSettings& settings);

 private:
  KernelMatrix() = default;

  GridPtr grid_;
  int n_ = 0;
  double gamma_ = 0.0;
  KernelSettings settings_;
  std::size_t size_ = 0;
  std::vector<double> entries_;
  KernelDiagnostics diag_;
};

RadialField apply_convolution(const KernelMatrix& K, const RadialField& U);

}
