#pragma once

#include <functional>
#include <vector>

#include "convwave/exponents.hpp"
#include "convwave/fields.hpp"

namespace convwave {

/// P_k by the three-term recurrence. |z| beyond 1 + 1e-12 is rejected;
/// values inside the guard band are clamped to [-1, 1].
double legendre_poly(int k, double z);

/// T_k(z) = cos(k arccos z), same argument policy as legendre_poly.
double chebyshev_poly(int k, double z);

/// Largest delta (capped) with P_{m-1}(z), T_{m-1}(z) >= 1/2 on
/// [1/(1+delta), 1]. Degree-0 cases hold everywhere, so the cap is
/// returned. Computed once per (m, cap) and cached.
double delta_m(int m, double cap = 1.0);

/// Wedge constant of Sigma = { r - t >= max(R, delta t) }: 2/delta_m with
/// m = floor(n/2) for n >= 2; 0 for n = 1, where the region is just
/// x - t >= R.
double sigma_delta(int n);

bool in_sigma(double r, double t, double R, double delta);

/// Quadrature depths for the representation integrals.
struct WaveQuadOptions {
  int s_points = 10;       // Gauss points per time panel
  int lambda_points = 10;  // per lambda panel (odd-dimension inner integral)
  int inner_points = 40;   // eta-rule size (even-dimension inner integral)
  int rho_points = 24;     // Jacobi points, even-dimension outer integral
};

struct Estimate {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Source on the (lambda, s) strip together with its interpolation kinks,
/// so quadrature panels can be aligned to them.
struct SourceFn {
  std::function<double(double lambda, double s)> eval;
  std::vector<double> lambda_breaks;
  std::vector<double> s_breaks;

  static SourceFn from_field(const SpaceTimeField& F);
  static SourceFn smooth(std::function<double(double, double)> f);
};

/// eps * u0 where u0 = d_t W(f) + W(f + g), via the dimension-appropriate
/// representation: d'Alembert for n = 1, the Legendre-kernel line integral
/// for odd n, the Tschebyscheff double integral for even n. An empty f is
/// treated as zero (the standing hypothesis here); a nonzero f's time
/// derivative is taken by central differencing of W(f).
/// Evaluation at x_norm = 0 in n >= 2 substitutes a small positive radius;
/// the r -> 0 limit is approached to about 1e-6 relative.
double free_solution_u0(const std::function<double(double)>& f,
                        const std::function<double(double)>& g,
                        const ProblemSpec& spec, double x_norm, double t);

/// (1/(2 r^m)) int_0^t (1+s)^{-2} int_{|r-tau|}^{r+tau} lambda^m
///   F(lambda, s) P_{m-1}((lambda^2+r^2-tau^2)/(2 r lambda)) dlambda ds,
/// tau = t - s, n = 2m + 1. The error estimate comes from re-evaluation
/// at reduced quadrature order.
Estimate duhamel_term_odd(double r, double t, const SourceFn& F,
                          const ProblemSpec& spec,
                          const WaveQuadOptions& opt = {});
Estimate duhamel_term_odd(double r, double t, const SpaceTimeField& F,
                          const ProblemSpec& spec,
                          const WaveQuadOptions& opt = {});

/// (1/(pi r^{m-1})) int_0^t (1+s)^{-2} J(r, t-s, F(., s)) ds, n = 2m, with
///   J(r, tau, w) = int_0^tau rho (tau^2-rho^2)^{-1/2}
///     int_{|r-rho|}^{r+rho} lambda^m w(lambda)
///       T_{m-1}((lambda^2+r^2-rho^2)/(2 r lambda))
///       [(lambda^2-(r-rho)^2)((r+rho)^2-lambda^2)]^{-1/2} dlambda drho.
/// The inverse square roots are absorbed into Jacobi weights.
Estimate duhamel_term_even(double r, double t, const SourceFn& F,
                           const ProblemSpec& spec,
                           const WaveQuadOptions& opt = {});
/// (1/2) int_0^t (1+s)^{-2} int_{x-(t-s)}^{x+(t-s)} F(|y|, s) dy ds, the
/// d'Alembert form on the line (n = 1, even data).
Estimate duhamel_term_line(double x, double t, const SourceFn& F,
                           const ProblemSpec& spec,
                           const WaveQuadOptions& opt = {});

Estimate duhamel_term_even(double r, double t, const SpaceTimeField& F,
                           const ProblemSpec& spec,
                           const WaveQuadOptions& opt = {});

/// The mean-value operator on radial profiles: surface mean over |w| = 1
/// of phi(|x + t w|) for odd n, the (1-|xi|^2)^{-1/2}-weighted unit-ball
/// mean for even n (normalized by 2/omega_{n+1}). t = 0 returns phi(|x|).
double spherical_mean(const std::function<double(double)>& phi, double x_norm,
                      double t, int n);

}
