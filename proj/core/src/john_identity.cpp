#include "convwave/john_identity.hpp"

#include <cmath>
#include <stdexcept>

#include "convwave/quadrature.hpp"
#include "convwave/special_functions.hpp"

namespace convwave {

double h_kernel(double eta, double rho, double r, int n) {
  if (n < 2) throw std::invalid_argument("h_kernel: n must be >= 2");
  if (!(rho > 0.0) || !(r > 0.0))
    throw std::invalid_argument("h_kernel: rho and r must be positive");
  const double lo = std::abs(rho - r), hi = rho + r;
  if (eta < lo || eta > hi)
    throw std::domain_error("h_kernel: eta outside [|rho-r|, rho+r]");
  if (n == 3) return 1.0;
  const double s = 0.5 * (n - 3);
  double f1 = eta * eta - lo * lo;
  double f2 = hi * hi - eta * eta;
  if (f1 <= 0.0 || f2 <= 0.0) {
    if (s < 0.0)
      throw std::domain_error("h_kernel: endpoint evaluation with negative exponent");
    if (s == 0.0) return 1.0;
    return 0.0;
  }
  return std::pow(f1, s) * std::pow(f2, s);
}

JohnMean john_sphere_mean_detail(const std::function<double(double)>& b,
                                 double r, double rho, int n, int points) {
  if (n < 2) throw std::invalid_argument("john_sphere_mean: n must be >= 2");
  if (!(r > 0.0) || !(rho > 0.0))
    throw std::invalid_argument("john_sphere_mean: r and rho must be positive");
  const double a = std::abs(rho - r), bb = rho + r;
  const double s = 0.5 * (n - 3);
  const double pref = std::pow(2.0, 3.0 - n) * unit_sphere_area(n - 1) *
                      std::pow(r * rho, 2.0 - n);
  auto run = [&](int q) {
    return pref * eta_weighted_integral(a, bb, s, 1.0, b, q);
  };
  JohnMean out;
  out.value = run(points);
  double coarse = run(std::max(4, (2 * points) / 3));
  out.error_estimate = std::abs(out.value - coarse);
  return out;
}

double john_sphere_mean(const std::function<double(double)>& b, double r,
                        double rho, int n, int points) {
  return john_sphere_mean_detail(b, r, rho, n, points).value;
}

}
