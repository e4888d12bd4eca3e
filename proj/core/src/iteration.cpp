#include "convwave/iteration.hpp"

#include <cmath>
#include <stdexcept>

#include "convwave/special_functions.hpp"
#include "convwave/wave_rep.hpp"

namespace convwave {

namespace {

const double kLog3 = std::log(3.0);

Rational pow3(int e) {
  Rational p{1};
  for (int i = 0; i < e; ++i) p = p * Rational{3};
  return p;
}

}  // namespace

IterationParams IterationParams::from_spec(const ProblemSpec& spec) {
  IterationParams p;
  p.n = spec.n;
  p.gamma = Rational::from_double(spec.gamma);
  p.nu = Rational::from_double(spec.nu);
  p.A = spec.A;
  p.eps = spec.eps;
  return p;
}

IterationState initial_state(const IterationParams& params) {
  if (params.n < 1) throw std::invalid_argument("initial_state: n >= 1");
  if (!(params.A > 0.0) || !(params.eps > 0.0))
    throw std::invalid_argument("initial_state: A > 0 and eps > 0 required");
  IterationState s;
  s.j = 1;
  s.a = Rational{1};
  s.b = Rational{1} + params.nu;
  s.d = Rational{0};
  s.log_c = std::log(params.A) + std::log(params.eps) - std::log(8.0);
  s.params = params;
  return s;
}

IterationState advance(const IterationState& state) {
  const int n = state.params.n;
  IterationState next = state;
  next.j = state.j + 1;
  next.a = state.a * Rational{3} + Rational{3 * n + 1, 2};
  next.b = state.b * Rational{3} + Rational{n + 3, 2} + state.params.gamma;
  next.d = state.d * Rational{3} + Rational{1};
  // c' = C c^3 / (8 (2d+1) a'^2), a' = 3a + (3n+1)/2
  double two_d1 = (state.d * Rational{2} + Rational{1}).to_double();
  next.log_c = std::log(kernel_constant(n)) + 3.0 * state.log_c -
               std::log(8.0) - std::log(two_d1) -
               2.0 * std::log(next.a.to_double());
  return next;
}

ClosedForm closed_form(int j, const IterationParams& params) {
  if (j < 1) throw std::invalid_argument("closed_form: j >= 1 required");
  const int n = params.n;
  Rational p = pow3(j - 1);
  ClosedForm cf;
  cf.a = p * Rational{3 * n + 5, 4} - Rational{3 * n + 1, 4};
  cf.b = p * (Rational{7 + n, 4} + params.nu + params.gamma / Rational{2}) -
         (params.gamma / Rational{2} + Rational{n + 3, 4});
  cf.d = (p - Rational{1}) / Rational{2};
  return cf;
}

double kernel_constant(int n) {
  if (n < 1) throw std::invalid_argument("kernel_constant: n >= 1 required");
  if (n == 1) return 4.0;
  double c0 = std::ldexp(1.0, 3 - n) * unit_sphere_area(n - 1);
  if (n == 2) return std::sqrt(2.0) * c0;
  double c1 = std::exp2(0.5 * (3.0 * n - 5.0)) * gamma_fn(0.5 * (n - 1)) *
              gamma_fn(n - 1.0) / gamma_fn(1.5 * (n - 1));
  return c0 * c1;
}

double admissible_time_threshold(const ProblemSpec& spec) {
  if (spec.n == 1) return std::max(spec.R, 1.0);
  return std::max(spec.R / sigma_delta(spec.n), 1.0);
}

BlowupConstants blowup_constants(const ProblemSpec& spec) {
  BlowupConstants k;
  k.C = kernel_constant(spec.n);
  double q = 3.0 * spec.n + 5.0;
  k.D = 6.0 * k.C / (q * q);
  double p = spec.n - spec.gamma - 2.0 * spec.nu;
  if (p > 0.0) {
    // B = (sqrt(D) A 2^{-3} 3^{-9/4})^{-2/p}
    double log_base = 0.5 * std::log(k.D) + std::log(spec.A) -
                      3.0 * std::log(2.0) - 2.25 * kLog3;
    k.B = std::exp(-2.0 / p * log_base);
    k.eps0 = std::pow(k.B / admissible_time_threshold(spec), 0.5 * p);
  } else {
    k.B = std::nan("");
    k.eps0 = std::nan("");
  }
  return k;
}

double c_lower_bound_log(int j, const BlowupConstants& k, double c1) {
  if (j < 1) throw std::invalid_argument("c_lower_bound: j >= 1 required");
  if (!(k.D > 0.0) || !(c1 > 0.0))
    throw std::invalid_argument("c_lower_bound: D > 0 and c1 > 0 required");
  double w1 = std::log(c1) - 2.25 * kLog3 + 0.5 * std::log(k.D);
  return -0.5 * std::log(k.D) + std::pow(3.0, j - 1) * w1;
}

double c_lower_bound(int j, const BlowupConstants& k, double c1) {
  return std::exp(c_lower_bound_log(j, k, c1));
}

double blowup_functional_K(double t, double eps, const BlowupConstants& k,
                           const ProblemSpec& spec) {
  if (t < admissible_time_threshold(spec))
    throw std::domain_error("blowup_functional_K: t below max(R/delta, 1)");
  if (!(eps > 0.0))
    throw std::invalid_argument("blowup_functional_K: eps > 0 required");
  double p = spec.n - spec.gamma - 2.0 * spec.nu;
  return std::log(eps) + 0.5 * std::log(k.D) + std::log(spec.A) -
         3.0 * std::log(2.0) - 2.25 * kLog3 + 0.5 * p * std::log(t);
}

double lifespan_upper_bound(const ProblemSpec& spec, const BlowupConstants& k) {
  double p = spec.n - spec.gamma - 2.0 * spec.nu;
  if (!(p > 0.0))
    throw std::domain_error(
        "lifespan_upper_bound: hypothesis nu < (n - gamma)/2 failed");
  if (!(spec.eps <= k.eps0))
    throw std::domain_error(
        "lifespan_upper_bound: hypothesis eps <= eps0 failed");
  return k.B * std::pow(spec.eps, -2.0 / p);
}

double first_step_lower_bound(double r, double t, const ProblemSpec& spec) {
  if (t < 0.0)
    throw std::domain_error("first_step_lower_bound: t >= 0 required");
  if (spec.n == 1) {
    if (r - t < spec.R)
      throw std::domain_error("first_step_lower_bound: x - t >= R required");
    return spec.A * spec.eps * t /
           (2.0 * std::pow(1.0 + r + t, 1.0 + spec.nu));
  }
  if (!in_sigma(r, t, spec.R, sigma_delta(spec.n)))
    throw std::domain_error(
        "first_step_lower_bound: (r,t) outside r - t >= max(R, delta t)");
  return spec.A * spec.eps * t / (8.0 * std::pow(1.0 + r + t, 1.0 + spec.nu));
}

double gconv_lower_bound(double lambda, double s, const IterationState& state,
                         const BlowupConstants& k, const ProblemSpec& spec) {
  if (spec.n < 2)
    throw std::invalid_argument("gconv_lower_bound: n >= 2 required");
  if (s < 0.0) throw std::domain_error("gconv_lower_bound: s >= 0 required");
  double delta = sigma_delta(spec.n);
  double shift = std::max(spec.R, delta * s);
  if (lambda - s < shift)
    throw std::domain_error(
        "gconv_lower_bound: lambda - s >= max(R, delta s) required");
  double bracket = lambda - s - shift;
  if (s == 0.0 || bracket == 0.0) return 0.0;

  double a = state.a.to_double();
  double b = state.b.to_double();
  double two_d1 = (state.d * Rational{2} + Rational{1}).to_double();
  double lg = std::log(k.C) + 2.0 * state.log_c +
              (2.0 * a + 1.5 * (spec.n - 1)) * std::log(s) +
              two_d1 * std::log(bracket) - std::log(two_d1) -
              spec.gamma * std::log(2.0) -
              (0.5 * (spec.n - 1) + spec.gamma) * std::log(lambda) -
              2.0 * b * std::log1p(s + lambda);
  return std::exp(lg);
}

}
