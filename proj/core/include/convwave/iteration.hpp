#pragma once
// Bootstrap sequences of the blow-up argument, the kernel constant and its
// derived constants, the blow-up functional, and the lifespan bound.
//
// The exponent sequences a_j, b_j, d_j are exact rationals so the
// recurrence and the closed forms agree with zero tolerance. c_j grows
// triple-exponentially and is tracked as log c_j.

#include <string>

#include "convwave/exponents.hpp"
#include "convwave/rational.hpp"

namespace convwave {

struct IterationParams {
  int n = 3;
  Rational gamma{1};
  Rational nu{1, 2};
  double A = 1.0;
  double eps = 1e-2;

  // gamma and nu are converted exactly (doubles are dyadic rationals).
  static IterationParams from_spec(const ProblemSpec& spec);
};

struct IterationState {
  int j = 1;
  Rational a{1};
  Rational b{1};
  Rational d{0};
  double log_c = 0.0;
  IterationParams params;
};

// j = 1: a = 1, b = 1 + nu, d = 0, c = A eps / 8.
IterationState initial_state(const IterationParams& params);

// One bootstrap step:
//   a' = 3a + (3n+1)/2,  b' = 3b + (n+3)/2 + gamma,  d' = 3d + 1,
//   c' = C c^3 / (8 (2d+1) {3a + (3n+1)/2}^2)   with C = kernel_constant(n).
IterationState advance(const IterationState& state);

struct ClosedForm {
  Rational a;
  Rational b;
  Rational d;
};

// a_j = 3^{j-1}(3n+5)/4 - (3n+1)/4
// b_j = 3^{j-1}(7+4nu+2gamma+n)/4 - (2gamma+n+3)/4
// d_j = (3^{j-1} - 1)/2
ClosedForm closed_form(int j, const IterationParams& params);

// Constant of the convolution lower bound:
//   n >= 3: C0*C1 with C0 = 2^{3-n} omega_{n-1},
//           C1 = 2^{(3n-5)/2} Gamma((n-1)/2) Gamma(n-1) / Gamma(3(n-1)/2)
//   n == 2: sqrt(2)*C0
//   n == 1: 4. The line recurrence is
//           c' = c^3/(2(3a+1)(3a+2)(2d+1)); since 4(3a+2) > 4(3a+1) it
//           dominates the generic form with C = 4, so the induction bound
//           stays one-sided.
double kernel_constant(int n);

struct BlowupConstants {
  double C = 0;     // kernel constant
  double D = 0;     // 6C/(3n+5)^2
  double B = 0;     // lifespan coefficient; NaN when n - gamma - 2nu <= 0
  double eps0 = 0;  // admissible data-size threshold; NaN as above
};

BlowupConstants blowup_constants(const ProblemSpec& spec);

// Time from which the blow-up functional is admissible:
// max(R/delta, 1), or max(R, 1) on the line where delta degenerates.
double admissible_time_threshold(const ProblemSpec& spec);

// log of the induction lower bound
//   c_j >= D^{-1/2} exp(3^{j-1} log(c1 3^{-9/4} sqrt(D))).
double c_lower_bound_log(int j, const BlowupConstants& k, double c1);
// exp of the above. Overflows to inf (or flushes to 0) once 3^{j-1}
// exceeds the double range; compare in log space instead.
double c_lower_bound(int j, const BlowupConstants& k, double c1);

// K(t) = log(eps sqrt(D) A 2^{-3} 3^{-9/4} t^{(n-gamma-2nu)/2}).
// Positive exactly when t exceeds the lifespan bound. t below
// admissible_time_threshold is rejected.
double blowup_functional_K(double t, double eps, const BlowupConstants& k,
                           const ProblemSpec& spec);

// B eps^{-2/(n-gamma-2nu)} with B = (sqrt(D) A 2^{-3} 3^{-9/4})^{-2/(n-gamma-2nu)}.
// Throws std::domain_error naming the failed hypothesis when
// nu >= (n-gamma)/2 or eps > eps0.
double lifespan_upper_bound(const ProblemSpec& spec, const BlowupConstants& k);

// First bootstrap input: A eps t / (8(1+r+t)^{1+nu}) on the wedge
// r - t >= max(R, delta t); on the line the sharper
// A eps t / (2(1+x+t)^{1+nu}) holds for x - t >= R.
double first_step_lower_bound(double r, double t, const ProblemSpec& spec);

// Right-hand side of the convolution lower bound at bootstrap state
// (a,b,c,d), n >= 2:
//   C c^2 s^{2a+3(n-1)/2} {lambda-s-max(R,delta s)}^{2d+1}
//   / ((2d+1) 2^gamma lambda^{(n-1)/2+gamma} (1+s+lambda)^{2b})
double gconv_lower_bound(double lambda, double s, const IterationState& state,
                         const BlowupConstants& k, const ProblemSpec& spec);

}
