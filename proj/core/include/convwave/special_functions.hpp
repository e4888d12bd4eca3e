#pragma once

namespace convwave {

/// Gamma function on (0, inf), accurate to at least 12 significant digits.
double gamma_fn(double x);

/// log Gamma on (0, inf).
double log_gamma_fn(double x);

/// Euler Beta B(p, q) = Gamma(p) Gamma(q) / Gamma(p+q), p, q > 0.
double beta_fn(double p, double q);

/// Surface measure of the unit sphere in R^n: 2 pi^{n/2} / Gamma(n/2).
double unit_sphere_area(int n);

/// int_alpha^beta (z - alpha)^{p-1} (beta - z)^{q-1} dz
///   = (beta - alpha)^{p+q-1} B(p, q),  p, q > 0, beta > alpha.
double weighted_interval_integral(double alpha, double beta, double p, double q);

}
