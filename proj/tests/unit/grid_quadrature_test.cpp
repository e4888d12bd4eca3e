#include <cmath>
#include <random>

#include "doctest.h"

#include "convwave/quadrature.hpp"
#include "convwave/radial_grid.hpp"
#include "convwave/special_functions.hpp"

using namespace convwave;

namespace {

const double kPi = std::acos(-1.0);

double u01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

}  // namespace

TEST_CASE("gauss legendre integrates polynomials exactly") {
  const GaussRule& g = gauss_legendre(6);  // degree 11
  double mass = 0.0, x10 = 0.0;
  for (std::size_t k = 0; k < g.nodes.size(); ++k) {
    mass += g.weights[k];
    x10 += g.weights[k] * std::pow(g.nodes[k], 10);
  }
  CHECK(mass == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(x10 == doctest::Approx(2.0 / 11.0).epsilon(1e-13));
}

TEST_CASE("gauss jacobi weights sum to the weight mass") {
  for (double a : {-0.5, 0.0, 0.5, 1.5}) {
    for (double b : {-0.5, 0.0, 2.0}) {
      const GaussRule& g = gauss_jacobi(10, a, b);
      double mass = 0.0;
      for (double w : g.weights) mass += w;
      CHECK(mass == doctest::Approx(jacobi_weight_mass(a, b)).epsilon(1e-12));
    }
  }
}

TEST_CASE("jacobi weight mass closed forms") {
  // int_{-1}^{1} (1-x)^a (1+x)^b dx = 2^{a+b+1} B(a+1, b+1)
  CHECK(jacobi_weight_mass(0.0, 0.0) == doctest::Approx(2.0));
  CHECK(jacobi_weight_mass(1.0, 0.0) == doctest::Approx(2.0));
  CHECK(jacobi_weight_mass(0.5, 0.0) ==
        doctest::Approx(4.0 * std::sqrt(2.0) / 3.0).epsilon(1e-13));
  CHECK(jacobi_weight_mass(-0.5, -0.5) == doctest::Approx(kPi).epsilon(1e-13));
}

TEST_CASE("gauss jacobi integrates a smooth factor against the weight") {
  // int_{-1}^1 (1-x)^{1/2} e^x dx, reference from adaptive quadrature
  AdaptiveOptions opt;
  opt.rel_tol = 1e-13;
  opt.singular_points = {1.0};
  double ref = adaptive_integrate(
                   [](double x) { return std::sqrt(1.0 - x) * std::exp(x); },
                   -1.0, 1.0, opt)
                   .value;
  const GaussRule& g = gauss_jacobi(16, 0.5, 0.0);
  double acc = 0.0;
  for (std::size_t k = 0; k < g.nodes.size(); ++k)
    acc += g.weights[k] * std::exp(g.nodes[k]);
  CHECK(acc == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("special function frozen values") {
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-13));
  CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-13));
  CHECK(beta_fn(1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(beta_fn(0.5, 0.5) == doctest::Approx(kPi).epsilon(1e-13));
  CHECK(beta_fn(2.0, 3.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
  CHECK(unit_sphere_area(2) == doctest::Approx(2.0 * kPi).epsilon(1e-14));
  CHECK(unit_sphere_area(3) == doctest::Approx(4.0 * kPi).epsilon(1e-14));
  CHECK(unit_sphere_area(4) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-14));
  CHECK(std::exp(log_gamma_fn(7.5)) ==
        doctest::Approx(gamma_fn(7.5)).epsilon(1e-12));
}

TEST_CASE("weighted interval integral closed form and oracle") {
  CHECK(weighted_interval_integral(0.0, 1.0, 1.0, 1.0) ==
        doctest::Approx(1.0).epsilon(1e-14));
  // width-2 interval with p = (n-1)/2, q = n-1 at n = 3 evaluates to 2
  CHECK(weighted_interval_integral(2.0, 4.0, 1.0, 2.0) ==
        doctest::Approx(2.0).epsilon(1e-13));
  CHECK_THROWS(weighted_interval_integral(1.0, 1.0, 1.0, 1.0));

  // endpoint-singular exponents against exact Beta values: B(1/2,1/2) = pi
  // and 2 B(1/2,3/2) = pi
  CHECK(weighted_interval_integral(1.0, 3.0, 0.5, 0.5) ==
        doctest::Approx(std::acos(-1.0)).epsilon(1e-13));
  CHECK(weighted_interval_integral(0.0, 2.0, 0.5, 1.5) ==
        doctest::Approx(std::acos(-1.0)).epsilon(1e-13));

  // the adaptive oracle covers the continuous range p, q >= 1
  std::mt19937_64 rng(7);
  for (int c = 0; c < 50; ++c) {
    double alpha = 3.0 * u01(rng);
    double beta = alpha + 0.5 + 2.0 * u01(rng);
    double p = 1.0 + 2.0 * u01(rng);
    double q = 1.0 + 2.0 * u01(rng);
    AdaptiveOptions opt;
    opt.rel_tol = 1e-13;
    opt.singular_points = {alpha, beta};
    double ref =
        adaptive_integrate(
            [&](double z) {
              return std::pow(z - alpha, p - 1.0) * std::pow(beta - z, q - 1.0);
            },
            alpha, beta, opt)
            .value;
    CHECK(weighted_interval_integral(alpha, beta, p, q) ==
          doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("eta weighted integral against the adaptive oracle") {
  // a = 0 branch, closed form: int_0^1 eta^2 (eta^2)^{-1/2} (1-eta^2)^{-1/2}
  //   = int_0^1 eta (1-eta^2)^{-1/2} d eta = 1
  double v = eta_weighted_integral(0.0, 1.0, -0.5, 2.0,
                                   [](double) { return 1.0; });
  CHECK(v == doctest::Approx(1.0).epsilon(1e-12));

  // independent route: eta^2 = a^2 + (b^2 - a^2) sin^2(phi) turns both edge
  // factors into (sin phi cos phi)^{2s+1}, which is smooth for s = +-1/2.
  // Bisection in eta cannot do better than ~1e-8 here: panels touching a
  // singular endpoint at eta = O(1) cannot shrink below a few hundred ulp.
  auto oracle = [](double a, double b, double s, double e) {
    double d2 = b * b - a * a;
    AdaptiveOptions opt;
    opt.rel_tol = 1e-13;
    double v = adaptive_integrate(
                   [=](double phi) {
                     double sn = std::sin(phi), cs = std::cos(phi);
                     double eta = std::sqrt(a * a + d2 * sn * sn);
                     return std::pow(eta, e - 1.0) *
                            std::pow(sn * cs, 2.0 * s + 1.0) * std::cos(eta);
                   },
                   0.0, 0.5 * std::acos(-1.0), opt)
                   .value;
    return std::pow(d2, 2.0 * s + 1.0) * v;
  };
  auto cosf = [](double eta) { return std::cos(eta); };

  // narrow interval, single Jacobi rule path
  CHECK(eta_weighted_integral(1.0, 2.0, -0.5, 0.0, cosf, 40) ==
        doctest::Approx(oracle(1.0, 2.0, -0.5, 0.0)).epsilon(1e-11));
  CHECK(eta_weighted_integral(2.0, 3.0, 0.5, 1.0, cosf, 40) ==
        doctest::Approx(oracle(2.0, 3.0, 0.5, 1.0)).epsilon(1e-11));
  // wide interval, split path
  CHECK(eta_weighted_integral(0.1, 4.0, -0.5, 0.0, cosf, 40) ==
        doctest::Approx(oracle(0.1, 4.0, -0.5, 0.0)).epsilon(1e-10));
  // a = 0 with positive weight exponent
  CHECK(eta_weighted_integral(0.0, 2.0, 0.5, 1.0, cosf, 40) ==
        doctest::Approx(oracle(0.0, 2.0, 0.5, 1.0)).epsilon(1e-11));

  // divergent combination rejected
  CHECK_THROWS(eta_weighted_integral(0.0, 1.0, -0.5, -0.5, cosf));
}

TEST_CASE("adaptive integrator handles endpoint singularities") {
  AdaptiveOptions opt;
  opt.rel_tol = 1e-12;
  opt.singular_points = {0.0};
  IntegrationResult r =
      adaptive_integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                         opt);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-10));

  opt = {};
  opt.breakpoints = {0.5};
  r = adaptive_integrate([](double x) { return std::abs(x - 0.5); }, 0.0, 1.0,
                         opt);
  CHECK(r.value == doctest::Approx(0.25).epsilon(1e-13));
}

TEST_CASE("uniform grid layout and trapezoid weights") {
  RadialGrid g = RadialGrid::uniform(0.125, 2.0);
  CHECK(g.kind() == GridKind::Uniform);
  CHECK(g.size() == 17);
  CHECK(g.nodes().front() == 0.0);
  CHECK(g.r_max() == doctest::Approx(2.0));
  CHECK(g.spacing() == doctest::Approx(0.125));

  double plain = 0.0, rho = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    plain += g.plain_weights()[i];
    rho += g.weights()[i];
  }
  CHECK(plain == doctest::Approx(2.0).epsilon(1e-14));
  // integrand rho is linear, trapezoid is exact
  CHECK(rho == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("gauss panel grid quadrature is spectrally accurate") {
  RadialGrid g = RadialGrid::gauss_panels(0.0, 2.0, 4, 10);
  double cubic = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    cubic += g.plain_weights()[i] * std::pow(g.nodes()[i], 3);
  CHECK(cubic == doctest::Approx(4.0).epsilon(1e-14));

  double rho_exp = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    rho_exp += g.weights()[i] * std::exp(-g.nodes()[i]);
  // int_0^2 rho e^{-rho} d rho = 1 - 3 e^{-2}
  CHECK(rho_exp ==
        doctest::Approx(1.0 - 3.0 * std::exp(-2.0)).epsilon(1e-13));
}

TEST_CASE("panel bookkeeping and interpolation") {
  std::vector<PanelSpec> ps{{0.0, 1.0, 8}, {1.0, 3.0, 12}};
  RadialGrid g = RadialGrid::gauss_panels(ps);
  CHECK(g.panel_count() == 2);
  CHECK(g.panel_lo(1) == doctest::Approx(1.0));
  CHECK(g.panel_hi(1) == doctest::Approx(3.0));
  CHECK(g.panel_begin(1) == 8);
  CHECK(g.panel_end(1) == 20);

  std::vector<double> samples(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    samples[i] = std::sin(g.nodes()[i]);
  // Lagrange through an 8-point panel leaves ~1e-9 of sin on the table.
  CHECK(g.interpolate(samples, 0.37) ==
        doctest::Approx(std::sin(0.37)).epsilon(1e-8));
  CHECK(g.interpolate(samples, 2.6) ==
        doctest::Approx(std::sin(2.6)).epsilon(1e-8));
  CHECK(g.interpolate(samples, 3.5) == 0.0);

  // non-contiguous panels rejected
  std::vector<PanelSpec> broken{{0.0, 1.0, 4}, {1.5, 2.0, 4}};
  CHECK_THROWS(RadialGrid::gauss_panels(broken));
}

TEST_CASE("scaled grid stretches nodes and weights consistently") {
  RadialGrid g = RadialGrid::gauss_panels(0.0, 1.0, 2, 6);
  RadialGrid s = g.scaled(2.0);
  CHECK(s.r_max() == doctest::Approx(2.0));
  CHECK(s.nodes()[3] == doctest::Approx(2.0 * g.nodes()[3]));

  double m0 = 0.0, m1 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    m0 += g.plain_weights()[i];
    m1 += s.plain_weights()[i];
  }
  CHECK(m1 == doctest::Approx(2.0 * m0).epsilon(1e-14));
  CHECK(g.same_layout(g));
  CHECK(!g.same_layout(s));
}
