#pragma once

#include <string>
#include <string_view>

#include "convwave/fields.hpp"

namespace convwave {

/// Real number extended with +infinity, so exponent comparisons stay total
/// in one space dimension where the critical power is unbounded.
struct ExtendedReal {
  double value = 0.0;
  bool infinite = false;

  static ExtendedReal inf() { return {0.0, true}; }
  static ExtendedReal finite(double v) { return {v, false}; }

  friend bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.infinite) return false;
    if (b.infinite) return true;
    return a.value < b.value;
  }
  friend bool operator>(const ExtendedReal& a, const ExtendedReal& b) { return b < a; }
  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return a.infinite == b.infinite && (a.infinite || a.value == b.value);
  }
};

/// Problem parameters: dimension n, convolution potential exponent gamma in
/// (0, n), damping coefficient mu, data decay rate nu, data amplitude A,
/// data inner radius R, data size eps.  Validated on construction.
struct ProblemSpec {
  int n = 3;
  double gamma = 1.0;
  double mu = 2.0;
  double nu = 0.5;
  double A = 1.0;
  double R = 1.0;
  double eps = 1e-2;

  ProblemSpec() = default;
  ProblemSpec(int n_, double gamma_, double mu_, double nu_, double A_,
              double R_, double eps_);

  /// Flat JSON with keys n, gamma, mu, nu, a, r, eps; unknown keys rejected.
  static ProblemSpec from_json(std::string_view text);
  std::string to_json() const;
};

/// Positive root of (n-1) p^2 - (n+1) p - 2 = 0 for n >= 2; unbounded at
/// n = 1.
ExtendedReal strauss_exponent(int n);

/// 1 + 2/n.
double fujita_exponent(int n);

/// (n + 2 - mu - gamma) / 2; gamma must lie in (0, n).
double critical_decay(int n, double gamma, double mu);

/// u = (1+t)^{mu/2} v applied to a sampled profile.
RadialField liouville_forward(const RadialField& v, double t, double mu);

/// v = (1+t)^{-mu/2} u.
RadialField liouville_inverse(const RadialField& u, double t, double mu);

/// v_sigma(x, t) = sigma^{1 + (n-gamma)/2} u(sigma x, sigma t), resampled on
/// the induced grid (nodes and times divided by sigma).
SpaceTimeField scale_transform(const SpaceTimeField& u, double sigma, int n,
                               double gamma);

}
