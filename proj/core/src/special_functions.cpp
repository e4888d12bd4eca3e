#include "convwave/special_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace convwave {

double gamma_fn(double x) {
  if (!(x > 0.0)) throw std::domain_error("gamma_fn: argument must be positive");
  return std::tgamma(x);
}

double log_gamma_fn(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma_fn: argument must be positive");
  return std::lgamma(x);
}

double beta_fn(double p, double q) {
  if (!(p > 0.0) || !(q > 0.0))
    throw std::domain_error("beta_fn: arguments must be positive");
  if (p + q < 170.0) return std::tgamma(p) * std::tgamma(q) / std::tgamma(p + q);
  return std::exp(std::lgamma(p) + std::lgamma(q) - std::lgamma(p + q));
}

double unit_sphere_area(int n) {
  if (n < 1) throw std::domain_error("unit_sphere_area: dimension must be >= 1");
  return 2.0 * std::pow(M_PI, 0.5 * n) / gamma_fn(0.5 * n);
}

double weighted_interval_integral(double alpha, double beta, double p, double q) {
  if (!(beta > alpha))
    throw std::domain_error("weighted_interval_integral: need beta > alpha");
  return std::pow(beta - alpha, p + q - 1.0) * beta_fn(p, q);
}

}
