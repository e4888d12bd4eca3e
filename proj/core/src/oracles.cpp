#include "convwave/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "convwave/special_functions.hpp"

namespace convwave {

namespace {

// Integral over the polar angle against sin^{n-2}, times area(S^{n-2}).
// sign = +1 integrates b(|x + rho w|), sign = -1 integrates b(|x - rho w|);
// the two differ only by th -> pi - th so the singular grading flips ends.
IntegrationResult polar_angle_integral(const std::function<double(double)>& b,
                                       double r, double rho, int n, int sign,
                                       double rel_tol,
                                       const std::vector<double>& radius_breaks) {
  const double pi = std::acos(-1.0);
  const double area = unit_sphere_area(n - 1);
  auto arg = [&](double th) {
    // r^2 + rho^2 +- 2 r rho cos(th) cancels badly near the singular end
    // when r ~ rho; half-angle forms stay exact there.
    double half = (sign > 0) ? std::cos(0.5 * th) : std::sin(0.5 * th);
    double q = (r - rho) * (r - rho) + 4.0 * r * rho * half * half;
    return std::sqrt(std::max(q, 0.0));
  };
  auto f = [&](double th) {
    double s = std::sin(th);
    double w = (n == 2) ? 1.0 : std::pow(s, n - 2);
    return b(arg(th)) * w;
  };
  AdaptiveOptions ao;
  ao.rel_tol = rel_tol;
  // b may be singular or kinked where its argument hits zero or a breakpoint
  // radius; map those radii back to angles.
  double inner_min = std::abs(r - rho), inner_max = r + rho;
  double th_singular = (sign > 0) ? pi : 0.0;
  ao.singular_points.push_back(th_singular);
  for (double rb : radius_breaks) {
    if (rb <= inner_min || rb >= inner_max || r == 0.0 || rho == 0.0) continue;
    double c = (rb * rb - r * r - rho * rho) / (2.0 * r * rho * sign);
    if (c > -1.0 && c < 1.0) ao.breakpoints.push_back(std::acos(c));
  }
  IntegrationResult res = adaptive_integrate(f, 0.0, pi, ao);
  res.value *= area;
  res.error *= area;
  return res;
}

struct McAccumulator {
  double sum = 0.0, sum_sq = 0.0;
  std::uint64_t count = 0;
  void add(double x) { sum += x; sum_sq += x * x; ++count; }
  double mean() const { return count ? sum / double(count) : 0.0; }
};

inline double to_unit(std::uint64_t x) {
  // (0,1): never exactly 0, safe for log().
  return (double(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

OracleResult oracle_sphere_quadrature(const std::function<double(double)>& b,
                                      double x_norm, double rho, int n,
                                      double rel_tol) {
  if (n < 2) throw std::invalid_argument("oracle_sphere_quadrature: n >= 2");
  if (rho < 0.0 || x_norm < 0.0)
    throw std::invalid_argument("oracle_sphere_quadrature: negative radius");
  OracleResult out;
  if (rho == 0.0 || x_norm == 0.0) {
    // Argument is constant over the sphere.
    double v = b(std::max(rho, x_norm));
    out.value = unit_sphere_area(n) * v;
    out.error_estimate = 0.0;
    return out;
  }
  IntegrationResult res =
      polar_angle_integral(b, x_norm, rho, n, +1, rel_tol, {});
  out.value = res.value;
  out.error_estimate = res.error;
  out.converged = res.converged;
  out.samples = res.evaluations;
  return out;
}

OracleResult oracle_direct_convolution(const std::function<double(double)>& U,
                                       double x_norm, int n, double gamma,
                                       const ConvolutionOracleOptions& opt) {
  if (n < 1) throw std::invalid_argument("oracle_direct_convolution: n >= 1");
  if (!(gamma > 0.0 && gamma < n))
    throw std::invalid_argument("oracle_direct_convolution: need 0 < gamma < n");
  if (!(opt.support_radius > 0.0))
    throw std::invalid_argument("oracle_direct_convolution: support_radius");
  const double r = x_norm;
  const double S = opt.support_radius;
  OracleResult out;

  if (n == 1) {
    // G(x) = int_0^S U(s) (|x-s|^{-g} + (x+s)^{-g}) ds.
    auto f = [&](double s) {
      double a = std::abs(r - s), c = r + s;
      double k = std::pow(a, -gamma);
      if (c > 0.0) k += std::pow(c, -gamma);
      return U(s) * k;
    };
    AdaptiveOptions ao;
    ao.rel_tol = opt.rel_tol;
    ao.breakpoints = opt.breakpoints;
    if (r < S) ao.singular_points.push_back(r);
    if (r == 0.0) ao.singular_points.push_back(0.0);
    IntegrationResult res = adaptive_integrate(f, 0.0, S, ao);
    out.value = res.value;
    out.error_estimate = res.error;
    out.converged = res.converged;
    out.samples = res.evaluations;
    return out;
  }

  if (n <= 3) {
    // Nested polar quadrature: the inner angle integral averages the kernel
    // |x - s w|^{-gamma} over directions, the outer integral runs over the
    // source radius. The inner one is singular at th = 0 when s ~ r.
    double max_inner_rel = 0.0;
    bool inner_ok = true;
    std::uint64_t evals = 0;
    auto shell = [&](double s) {
      if (s == 0.0) return 0.0;
      auto kern = [&](double d) { return std::pow(d, -gamma); };
      IntegrationResult inner = polar_angle_integral(
          kern, r, s, n, -1, opt.rel_tol * 1e-2, {});
      evals += inner.evaluations;
      if (!inner.converged) inner_ok = false;
      if (inner.value != 0.0)
        max_inner_rel = std::max(max_inner_rel,
                                 std::abs(inner.error / inner.value));
      return std::pow(s, n - 1) * U(s) * inner.value;
    };
    AdaptiveOptions ao;
    ao.rel_tol = opt.rel_tol;
    ao.breakpoints = opt.breakpoints;
    if (r > 0.0 && r < S) ao.singular_points.push_back(r);
    ao.singular_points.push_back(0.0);
    IntegrationResult res = adaptive_integrate(shell, 0.0, S, ao);
    out.value = res.value;
    out.error_estimate = res.error + std::abs(res.value) * max_inner_rel;
    out.converged = res.converged && inner_ok;
    out.samples = res.evaluations + evals;
    return out;
  }

  // n >= 4: importance-sampled Monte Carlo. Substituting y = x + z and
  // drawing |z| = s with density prop. to s^{n-1-gamma} on [0, s_max]
  // absorbs the kernel entirely; the per-sample weight is constant:
  //   G = area(S^{n-1}) s_max^{n-gamma} / (n-gamma) * E[ U(|x + s w|) ].
  const double s_max = r + S;
  const double weight =
      unit_sphere_area(n) * std::pow(s_max, n - gamma) / (n - gamma);
  const double inv_exp = 1.0 / (n - gamma);

  const std::uint64_t batches = 64;
  const std::uint64_t per_batch = std::max<std::uint64_t>(opt.mc_samples / batches, 1);
  std::mt19937_64 rng(opt.seed);

  // Hand-rolled Box-Muller keeps the draw sequence identical across
  // standard libraries.
  const double two_pi = 2.0 * std::acos(-1.0);
  double spare = 0.0;
  bool has_spare = false;
  auto gaussian = [&]() {
    if (has_spare) {
      has_spare = false;
      return spare;
    }
    double u1 = to_unit(rng()), u2 = to_unit(rng());
    double m = std::sqrt(-2.0 * std::log(u1));
    spare = m * std::sin(two_pi * u2);
    has_spare = true;
    return m * std::cos(two_pi * u2);
  };

  McAccumulator batch_means;
  std::vector<double> gauss(n);
  for (std::uint64_t b = 0; b < batches; ++b) {
    double acc = 0.0;
    for (std::uint64_t j = 0; j < per_batch; ++j) {
      // Radial draw stratified within the batch.
      double u = (double(j) + to_unit(rng())) / double(per_batch);
      double s = s_max * std::pow(u, inv_exp);
      double norm2 = 0.0;
      do {
        norm2 = 0.0;
        for (int k = 0; k < n; ++k) {
          gauss[k] = gaussian();
          norm2 += gauss[k] * gauss[k];
        }
      } while (norm2 < 1e-300);
      double w1 = gauss[0] / std::sqrt(norm2);  // cos of angle to x
      double dist2 = r * r + s * s + 2.0 * r * s * w1;
      double dist = std::sqrt(std::max(dist2, 0.0));
      acc += (dist <= S) ? U(dist) : 0.0;
    }
    batch_means.add(acc / double(per_batch));
  }
  double mean = batch_means.mean();
  double var = (batch_means.sum_sq / double(batches) - mean * mean) *
               double(batches) / double(batches - 1);
  double stderr_mean = std::sqrt(std::max(var, 0.0) / double(batches));
  out.value = weight * mean;
  out.error_estimate = weight * stderr_mean;
  out.converged = true;
  out.samples = batches * per_batch;
  return out;
}

}
