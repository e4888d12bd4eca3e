#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "convwave/quadrature.hpp"

namespace convwave {

struct OracleResult {
  double value = 0.0;
  double error_estimate = 0.0;
  bool converged = true;
  std::uint64_t samples = 0;
};

struct ConvolutionOracleOptions {
  /// Radius beyond which U is treated as zero. Must be positive.
  double support_radius = 0.0;
  /// Known kinks/jumps of U (radii), e.g. the edge of an indicator.
  std::vector<double> breakpoints;
  double rel_tol = 1e-10;
  std::uint64_t mc_samples = 10'000'000;
  std::uint64_t seed = 1;
};

/// (|.|^{-gamma} * U(|.|))(x) for |x| = x_norm in R^n, computed without the
/// interval-kernel reduction: nested adaptive quadrature in polar form for
/// n <= 3, stratified importance-sampled Monte Carlo for n >= 4 (value and
/// batch-means standard error in error_estimate; bit-reproducible for a
/// fixed seed and sample count).
OracleResult oracle_direct_convolution(const std::function<double(double)>& U,
                                       double x_norm, int n, double gamma,
                                       const ConvolutionOracleOptions& opt);

/// Integral of b(|x + rho w|) over the unit sphere |w| = 1 in R^n, via the
/// polar-angle reduction
///   area(S^{n-2}) int_0^pi b(sqrt(r^2 + rho^2 + 2 r rho cos th)) sin^{n-2} th dth,
/// adaptively, graded toward th = pi where the argument can approach zero.
OracleResult oracle_sphere_quadrature(const std::function<double(double)>& b,
                                      double x_norm, double rho, int n,
                                      double rel_tol = 1e-11);

}
