#pragma once

#include <functional>

namespace convwave {

/// Interaction kernel of the spherical-means identity:
///   h(eta, rho, r) = (eta^2 - (rho - r)^2)^{(n-3)/2} ((rho + r)^2 - eta^2)^{(n-3)/2}
/// for |rho - r| <= eta <= rho + r.  Identically 1 when n = 3.  For n = 2 the
/// exponent is -1/2, so endpoint evaluation is a domain error.
double h_kernel(double eta, double rho, double r, int n);

struct JohnMean {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Mean of b(|x + rho w|) over the unit sphere |w| = 1 for |x| = r, reduced
/// to the line integral
///   2^{3-n} omega_{n-1} (r rho)^{2-n} int_{|rho-r|}^{rho+r} eta b(eta) h d eta,
/// evaluated with Gauss-Jacobi rules matched to the endpoint exponents.
JohnMean john_sphere_mean_detail(const std::function<double(double)>& b,
                                 double r, double rho, int n, int points = 32);

double john_sphere_mean(const std::function<double(double)>& b, double r,
                        double rho, int n, int points = 32);

}
