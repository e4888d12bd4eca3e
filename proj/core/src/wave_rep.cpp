#include "convwave/wave_rep.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <stdexcept>

#include "convwave/john_identity.hpp"
#include "convwave/quadrature.hpp"
#include "convwave/special_functions.hpp"

namespace convwave {

namespace {

constexpr double kArgSlack = 1e-12;
// Radius floor for the r -> 0 limit of the n >= 2 representations.
constexpr double kRadiusFloor = 1e-6;

double legendre_raw(int k, double z) {
  if (k <= 0) return 1.0;
  double pm = 1.0, p = z;
  for (int j = 1; j < k; ++j) {
    double pn = ((2.0 * j + 1.0) * z * p - j * pm) / (j + 1.0);
    pm = p;
    p = pn;
  }
  return p;
}

double chebyshev_raw(int k, double z) {
  if (k <= 0) return 1.0;
  return std::cos(static_cast<double>(k) * std::acos(z));
}

double checked_arg(int k, double z, const char* who) {
  if (k < 0) throw std::invalid_argument(std::string(who) + ": degree < 0");
  if (std::abs(z) > 1.0 + kArgSlack)
    throw std::domain_error(std::string(who) + ": argument outside [-1, 1]");
  return std::clamp(z, -1.0, 1.0);
}

// Polynomial argument of the representation kernels, clamped against
// rounding spill at the integration endpoints.
double poly_arg(double lambda, double r, double tau) {
  double z = (lambda * lambda + r * r - tau * tau) / (2.0 * r * lambda);
  return std::clamp(z, -1.0, 1.0);
}

double min_pt(int m, double z) {
  return std::min(legendre_raw(m - 1, z), chebyshev_raw(m - 1, z));
}

// Collects panel edges of [a, b] split at the given interior breakpoints.
std::vector<double> panel_edges(double a, double b,
                                const std::vector<double>& breaks) {
  std::vector<double> e{a};
  for (double x : breaks)
    if (x > a && x < b) e.push_back(x);
  e.push_back(b);
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return e;
}

// int_{|r-tau|}^{r+tau} lambda^m w(lambda) P_{m-1}(z(lambda)) dlambda
double odd_inner(double r, double tau, int m,
                 const std::function<double(double)>& w,
                 const std::vector<double>& breaks, int points) {
  double a = std::abs(r - tau), b = r + tau;
  if (!(b > a)) return 0.0;
  const GaussRule& gl = gauss_legendre(points);
  double acc = 0.0;
  auto edges = panel_edges(a, b, breaks);
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    double mid = 0.5 * (edges[p] + edges[p + 1]);
    double half = 0.5 * (edges[p + 1] - edges[p]);
    for (int q = 0; q < points; ++q) {
      double lam = mid + half * gl.nodes[q];
      if (!(lam > 0.0)) continue;
      double z = poly_arg(lam, r, tau);
      acc += half * gl.weights[q] * std::pow(lam, m) * w(lam) *
             legendre_raw(m - 1, z);
    }
  }
  return acc;
}

// J(r, tau, w): see the header. Jacobi rules absorb both inverse square
// roots; the lambda-integral reuses the eta-weighted machinery with
// s = -1/2, e = m.
double even_J(double r, double tau, int m,
              const std::function<double(double)>& w, int inner_points,
              int rho_points) {
  if (!(tau > 0.0) || !(r > 0.0)) return 0.0;
  const GaussRule& gj = gauss_jacobi(rho_points, -0.5, 0.0);
  double scale = std::sqrt(0.5 * tau);  // from (tau - rho)^{-1/2} mapping
  double acc = 0.0;
  for (int k = 0; k < rho_points; ++k) {
    double rho = 0.5 * tau * (1.0 + gj.nodes[k]);
    if (!(rho > 0.0)) continue;
    double a = std::abs(r - rho), b = r + rho;
    if (!(b > a)) continue;
    double inner = eta_weighted_integral(
        a, b, -0.5, static_cast<double>(m),
        [&](double lam) {
          return w(lam) * chebyshev_raw(m - 1, poly_arg(lam, r, rho));
        },
        inner_points);
    acc += gj.weights[k] * rho / std::sqrt(tau + rho) * inner;
  }
  return scale * acc;
}

// W(h | r, t): the propagator with data (0, h).
double wave_propagator(const std::function<double(double)>& h, int n, double r,
                       double t, const WaveQuadOptions& opt) {
  if (!(t > 0.0)) return 0.0;
  if (n == 1) {
    AdaptiveOptions ao;
    ao.rel_tol = 1e-12;
    ao.breakpoints = {0.0};
    auto res = adaptive_integrate([&](double y) { return h(std::abs(y)); },
                                  r - t, r + t, ao);
    return 0.5 * res.value;
  }
  double re = std::max(r, kRadiusFloor * (1.0 + t));
  if (n % 2 == 1) {
    int m = (n - 1) / 2;
    AdaptiveOptions ao;
    ao.rel_tol = 1e-12;
    auto res = adaptive_integrate(
        [&](double lam) {
          return std::pow(lam, m) * h(lam) *
                 legendre_raw(m - 1, poly_arg(lam, re, t));
        },
        std::abs(re - t), re + t, ao);
    return res.value / (2.0 * std::pow(re, m));
  }
  int m = n / 2;
  double J = even_J(re, t, m, h, opt.inner_points, opt.rho_points);
  return 2.0 / (std::acos(-1.0) * std::pow(re, m - 1)) * J;
}

WaveQuadOptions coarsen(const WaveQuadOptions& opt) {
  WaveQuadOptions c;
  c.s_points = std::max(4, (2 * opt.s_points) / 3);
  c.lambda_points = std::max(4, (2 * opt.lambda_points) / 3);
  c.inner_points = std::max(8, (2 * opt.inner_points) / 3);
  c.rho_points = std::max(6, (2 * opt.rho_points) / 3);
  return c;
}

// Common s-integral of both Duhamel forms: int_0^t (1+s)^{-2} I(s) ds with
// panels aligned to the source's time levels.
double time_integral(double t, const std::vector<double>& s_breaks,
                     int points, const std::function<double(double)>& I) {
  if (!(t > 0.0)) return 0.0;
  const GaussRule& gl = gauss_legendre(points);
  double acc = 0.0;
  auto edges = panel_edges(0.0, t, s_breaks);
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    double mid = 0.5 * (edges[p] + edges[p + 1]);
    double half = 0.5 * (edges[p + 1] - edges[p]);
    for (int q = 0; q < points; ++q) {
      double s = mid + half * gl.nodes[q];
      double damp = (1.0 + s) * (1.0 + s);
      acc += half * gl.weights[q] * I(s) / damp;
    }
  }
  return acc;
}

double duhamel_odd_value(double r, double t, const SourceFn& F, int m,
                         const WaveQuadOptions& opt) {
  double re = std::max(r, kRadiusFloor * (1.0 + t));
  double s_int = time_integral(t, F.s_breaks, opt.s_points, [&](double s) {
    return odd_inner(
        re, t - s, m, [&](double lam) { return F.eval(lam, s); },
        F.lambda_breaks, opt.lambda_points);
  });
  return s_int / (2.0 * std::pow(re, m));
}

double duhamel_even_value(double r, double t, const SourceFn& F, int m,
                          const WaveQuadOptions& opt) {
  double re = std::max(r, kRadiusFloor * (1.0 + t));
  double s_int = time_integral(t, F.s_breaks, opt.s_points, [&](double s) {
    return even_J(re, t - s, m, [&](double lam) { return F.eval(lam, s); },
                  opt.inner_points, opt.rho_points);
  });
  // same 2/pi normalization as the free propagator's even branch
  return 2.0 * s_int / (std::acos(-1.0) * std::pow(re, m - 1));
}

// int_{x-tau}^{x+tau} F(|y|, s) dy with panels split at y = 0 and at the
// (reflected) lambda breakpoints.
double line_inner(double x, double tau, double s, const SourceFn& F,
                  int points) {
  double a = x - tau, b = x + tau;
  if (!(b > a)) return 0.0;
  std::vector<double> br{0.0};
  for (double lb : F.lambda_breaks) {
    br.push_back(lb);
    br.push_back(-lb);
  }
  const GaussRule& gl = gauss_legendre(points);
  double acc = 0.0;
  auto edges = panel_edges(a, b, br);
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    double mid = 0.5 * (edges[p] + edges[p + 1]);
    double half = 0.5 * (edges[p + 1] - edges[p]);
    for (int q = 0; q < points; ++q) {
      double y = mid + half * gl.nodes[q];
      acc += half * gl.weights[q] * F.eval(std::abs(y), s);
    }
  }
  return acc;
}

double duhamel_line_value(double x, double t, const SourceFn& F,
                          const WaveQuadOptions& opt) {
  return 0.5 * time_integral(t, F.s_breaks, opt.s_points, [&](double s) {
           return line_inner(x, t - s, s, F, opt.lambda_points);
         });
}

}  // namespace

double legendre_poly(int k, double z) {
  return legendre_raw(k, checked_arg(k, z, "legendre_poly"));
}

double chebyshev_poly(int k, double z) {
  return chebyshev_raw(k, checked_arg(k, z, "chebyshev_poly"));
}

double delta_m(int m, double cap) {
  if (m < 1) throw std::invalid_argument("delta_m: m >= 1 required");
  if (!(cap > 0.0)) throw std::invalid_argument("delta_m: cap must be > 0");

  static std::map<std::pair<int, std::uint64_t>, double> cache;
  static std::mutex mutex;
  std::pair<int, std::uint64_t> key{m, std::bit_cast<std::uint64_t>(cap)};
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  // Largest left endpoint z* in (0, 1] below which min(P, T) dips under
  // 1/2; the admissible interval is [z*, 1].
  const int samples = 4096 * std::max(m, 2);
  double z_bad = -1.0;  // largest sample with min(P,T) < 1/2
  for (int i = 0; i <= samples; ++i) {
    double z = static_cast<double>(i) / samples;
    if (min_pt(m, z) < 0.5) z_bad = z;
  }
  double delta;
  if (z_bad < 0.0) {
    delta = cap;  // holds on all of [0, 1]
  } else {
    double lo = z_bad, hi = std::min(z_bad + 1.0 / samples, 1.0);
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      double mid = 0.5 * (lo + hi);
      (min_pt(m, mid) < 0.5 ? lo : hi) = mid;
    }
    double z_star = hi;
    delta = std::min(1.0 / z_star - 1.0, cap);
  }
  std::lock_guard<std::mutex> lock(mutex);
  cache.emplace(key, delta);
  return delta;
}

double sigma_delta(int n) {
  if (n < 1) throw std::invalid_argument("sigma_delta: n >= 1 required");
  if (n == 1) return 0.0;
  return 2.0 / delta_m(n / 2);
}

bool in_sigma(double r, double t, double R, double delta) {
  return r - t >= std::max(R, delta * t);
}

SourceFn SourceFn::from_field(const SpaceTimeField& F) {
  SourceFn s;
  const SpaceTimeField* field = &F;
  s.eval = [field](double lam, double t) { return field->eval(lam, t); };
  s.lambda_breaks = F.grid->nodes();
  s.s_breaks = F.times;
  return s;
}

SourceFn SourceFn::smooth(std::function<double(double, double)> f) {
  SourceFn s;
  s.eval = std::move(f);
  return s;
}

double free_solution_u0(const std::function<double(double)>& f,
                        const std::function<double(double)>& g,
                        const ProblemSpec& spec, double x_norm, double t) {
  if (t < 0.0) throw std::invalid_argument("free_solution_u0: t >= 0");
  if (!g) throw std::invalid_argument("free_solution_u0: g required");
  WaveQuadOptions opt;
  auto sum = [&](double rho) { return (f ? f(rho) : 0.0) + g(rho); };
  double val = wave_propagator(sum, spec.n, x_norm, t, opt);
  if (f) {
    // d_t W(f) by central differencing; W(f) vanishes at t = 0.
    double h = 1e-5 * (1.0 + t);
    double hi = wave_propagator(f, spec.n, x_norm, t + h, opt);
    double lo_t = std::max(t - h, 0.0);
    double lo = wave_propagator(f, spec.n, x_norm, lo_t, opt);
    val += (hi - lo) / (t + h - lo_t);
  }
  return spec.eps * val;
}

Estimate duhamel_term_odd(double r, double t, const SourceFn& F,
                          const ProblemSpec& spec,
                          const WaveQuadOptions& opt) {
  if (spec.n < 3 || spec.n % 2 == 0)
    throw std::invalid_argument("duhamel_term_odd: odd n >= 3 required");
  if (!F.eval) throw std::invalid_argument("duhamel_term_odd: empty source");
  int m = (spec.n - 1) / 2;
  double fine = duhamel_odd_value(r, t, F, m, opt);
  double coarse = duhamel_odd_value(r, t, F, m, coarsen(opt));
  return {fine, std::abs(fine - coarse)};
}

Estimate duhamel_term_odd(double r, double t, const SpaceTimeField& F,
                          const ProblemSpec& spec,
                          const WaveQuadOptions& opt) {
  return duhamel_term_odd(r, t, SourceFn::from_field(F), spec, opt);
}

Estimate duhamel_term_even(double r, double t, const SourceFn& F,
                           const ProblemSpec& spec,
                           const WaveQuadOptions& opt) {
  if (spec.n < 2 || spec.n % 2 == 1)
    throw std::invalid_argument("duhamel_term_even: even n required");
  if (!F.eval) throw std::invalid_argument("duhamel_term_even: empty source");
  int m = spec.n / 2;
  double fine = duhamel_even_value(r, t, F, m, opt);
  double coarse = duhamel_even_value(r, t, F, m, coarsen(opt));
  return {fine, std::abs(fine - coarse)};
}

Estimate duhamel_term_even(double r, double t, const SpaceTimeField& F,
                           const ProblemSpec& spec,
                           const WaveQuadOptions& opt) {
  return duhamel_term_even(r, t, SourceFn::from_field(F), spec, opt);
}

Estimate duhamel_term_line(double x, double t, const SourceFn& F,
                           const ProblemSpec& spec,
                           const WaveQuadOptions& opt) {
  if (spec.n != 1)
    throw std::invalid_argument("duhamel_term_line: n == 1 required");
  if (!F.eval) throw std::invalid_argument("duhamel_term_line: empty source");
  double fine = duhamel_line_value(x, t, F, opt);
  double coarse = duhamel_line_value(x, t, F, coarsen(opt));
  return {fine, std::abs(fine - coarse)};
}

double spherical_mean(const std::function<double(double)>& phi, double x_norm,
                      double t, int n) {
  if (n < 2) throw std::invalid_argument("spherical_mean: n >= 2 required");
  if (t < 0.0) throw std::invalid_argument("spherical_mean: t >= 0 required");
  if (t == 0.0) return phi(x_norm);

  if (n % 2 == 1) {
    if (x_norm == 0.0) return phi(t);
    return john_sphere_mean(phi, x_norm, t, n) / unit_sphere_area(n);
  }
  // Even n: (2/omega_{n+1}) int_{|xi|<=1} phi(|x + t xi|)
  //   (1-|xi|^2)^{-1/2} dxi, reduced over radial shells s = |xi|.
  const int q = 48;
  const GaussRule& gj = gauss_jacobi(q, -0.5, 0.0);
  double acc = 0.0;
  for (int k = 0; k < q; ++k) {
    double s = 0.5 * (1.0 + gj.nodes[k]);
    if (!(s > 0.0)) continue;
    double shell = (x_norm == 0.0)
                       ? unit_sphere_area(n) * phi(t * s)
                       : john_sphere_mean(phi, x_norm, t * s, n);
    acc += gj.weights[k] * std::pow(s, n - 1) / std::sqrt(1.0 + s) * shell;
  }
  // Mapping [0,1] with weight (1-s)^{-1/2} contributes sqrt(1/2).
  return std::sqrt(0.5) * acc * 2.0 / unit_sphere_area(n + 1);
}

}
