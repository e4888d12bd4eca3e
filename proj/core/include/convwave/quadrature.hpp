#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace convwave {

/// Nodes/weights on the reference interval [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached Gauss-Legendre rule, exact through degree 2q-1.
const GaussRule& gauss_legendre(int q);

/// Cached Gauss-Jacobi rule for the weight (1-x)^alpha (1+x)^beta,
/// alpha, beta > -1.  Computed by Golub-Welsch from the monic Jacobi
/// recurrence.
const GaussRule& gauss_jacobi(int q, double alpha, double beta);

/// Total mass of the Jacobi weight: int_{-1}^{1} (1-x)^a (1+x)^b dx.
double jacobi_weight_mass(double alpha, double beta);

/// int_a^b eta^e (eta^2 - a^2)^s (b^2 - eta^2)^s f(eta) d eta with
/// 0 <= a < b, s > -1.  The endpoint factors are absorbed into
/// Gauss-Jacobi weights; when b/a is large the interval is split
/// dyadically so the eta^e factor stays tame on every piece.
/// At a == 0 the combined left-endpoint exponent e + 2s must be > -1
/// or the integral diverges (domain error).
double eta_weighted_integral(double a, double b, double s, double e,
                             const std::function<double(double)>& f,
                             int points = 32);

struct IntegrationResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = true;
};

struct AdaptiveOptions {
  double abs_tol = 0.0;
  double rel_tol = 1e-11;
  int max_depth = 38;
  /// Known kinks/discontinuities: the interval is pre-split here.
  std::vector<double> breakpoints;
  /// Integrable endpoint singularities: panels grade geometrically
  /// into these points before the adaptive pass.
  std::vector<double> singular_points;
  int graded_levels = 50;
};

/// Globally adaptive Gauss quadrature (15/7 point error estimate).
IntegrationResult adaptive_integrate(const std::function<double(double)>& f,
                                     double a, double b,
                                     const AdaptiveOptions& opt = {});

}
