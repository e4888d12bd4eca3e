#include "convwave/quadrature.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <stdexcept>
#include <tuple>

#include "convwave/special_functions.hpp"

namespace convwave {

namespace {

// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with shifts,
// tracking the first component of each eigenvector (Golub-Welsch).  d holds
// the diagonal, e the subdiagonal; on return d carries the eigenvalues and
// z[k] the first eigenvector components.
void tridiagonal_ql(std::vector<double>& d, std::vector<double>& e,
                    std::vector<double>& z) {
  const int n = static_cast<int>(d.size());
  e.resize(n, 0.0);
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    while (true) {
      int m = l;
      for (; m < n - 1; ++m) {
        double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m == l) break;
      if (iter++ == 60)
        throw std::runtime_error("tridiagonal_ql: no convergence");
      double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
      double r = std::hypot(g, 1.0);
      g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
      double s = 1.0, c = 1.0, p = 0.0;
      bool underflow = false;
      for (int i = m - 1; i >= l; --i) {
        double f = s * e[i];
        double b = c * e[i];
        r = std::hypot(f, g);
        e[i + 1] = r;
        if (r == 0.0) {
          d[i + 1] -= p;
          e[m] = 0.0;
          underflow = true;
          break;
        }
        s = f / r;
        c = g / r;
        g = d[i + 1] - p;
        r = (d[i] - g) * s + 2.0 * c * b;
        p = s * r;
        d[i + 1] = g + p;
        g = c * r - b;
        f = z[i + 1];
        z[i + 1] = s * z[i] + c * f;
        z[i] = c * z[i] - s * f;
      }
      if (underflow) continue;
      d[l] -= p;
      e[l] = g;
      e[m] = 0.0;
    }
  }
}

GaussRule make_jacobi_rule(int q, double alpha, double beta) {
  if (q < 1) throw std::invalid_argument("gauss rule needs q >= 1");
  if (!(alpha > -1.0) || !(beta > -1.0))
    throw std::invalid_argument("jacobi weight exponents must exceed -1");

  const double ab = alpha + beta;
  std::vector<double> d(q), e(q, 0.0), z(q, 0.0);
  d[0] = (beta - alpha) / (ab + 2.0);
  for (int k = 1; k < q; ++k) {
    double two_k = 2.0 * k + ab;
    d[k] = (beta * beta - alpha * alpha) / (two_k * (two_k + 2.0));
    double bk;
    if (k == 1)
      bk = 4.0 * (1.0 + alpha) * (1.0 + beta) /
           ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    else
      bk = 4.0 * k * (k + alpha) * (k + beta) * (k + ab) /
           (two_k * two_k * (two_k + 1.0) * (two_k - 1.0));
    e[k - 1] = std::sqrt(bk);
  }
  z[0] = 1.0;
  tridiagonal_ql(d, e, z);

  const double mu0 = jacobi_weight_mass(alpha, beta);
  GaussRule rule;
  rule.nodes.resize(q);
  rule.weights.resize(q);
  std::vector<int> order(q);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return d[a] < d[b]; });
  for (int i = 0; i < q; ++i) {
    rule.nodes[i] = d[order[i]];
    rule.weights[i] = mu0 * z[order[i]] * z[order[i]];
  }
  return rule;
}

struct RuleKey {
  int q;
  std::uint64_t a_bits, b_bits;
  bool operator<(const RuleKey& o) const {
    return std::tie(q, a_bits, b_bits) < std::tie(o.q, o.a_bits, o.b_bits);
  }
};

const GaussRule& cached_rule(int q, double alpha, double beta) {
  thread_local std::map<RuleKey, GaussRule> cache;
  RuleKey key{q, std::bit_cast<std::uint64_t>(alpha),
              std::bit_cast<std::uint64_t>(beta)};
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, make_jacobi_rule(q, alpha, beta)).first;
  return it->second;
}

}  // namespace

double jacobi_weight_mass(double alpha, double beta) {
  return std::pow(2.0, alpha + beta + 1.0) * beta_fn(alpha + 1.0, beta + 1.0);
}

const GaussRule& gauss_legendre(int q) { return cached_rule(q, 0.0, 0.0); }

const GaussRule& gauss_jacobi(int q, double alpha, double beta) {
  return cached_rule(q, alpha, beta);
}

namespace {

// One Gauss-Jacobi pass on [lo, hi] for the weight
// (hi - eta)^alpha (eta - lo)^beta smooth(eta).
template <typename F>
double jacobi_panel(double lo, double hi, double alpha, double beta, int q,
                    F&& smooth) {
  const GaussRule& rule = gauss_jacobi(q, alpha, beta);
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  double acc = 0.0;
  for (int i = 0; i < q; ++i)
    acc += rule.weights[i] * smooth(mid + half * rule.nodes[i]);
  return acc * std::pow(half, alpha + beta + 1.0);
}

template <typename F>
double legendre_panel(double lo, double hi, int q, F&& f) {
  const GaussRule& rule = gauss_legendre(q);
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  double acc = 0.0;
  for (int i = 0; i < q; ++i)
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return acc * half;
}

}  // namespace

double eta_weighted_integral(double a, double b, double s, double e,
                             const std::function<double(double)>& f,
                             int points) {
  if (!(a >= 0.0) || !(b > 0.0))
    throw std::invalid_argument("eta_weighted_integral: need 0 <= a, 0 < b");
  if (b <= a) return 0.0;
  if (!(s > -1.0))
    throw std::invalid_argument("eta_weighted_integral: s must exceed -1");
  const int q = std::max(4, points);

  if (a == 0.0) {
    const double left = e + 2.0 * s;
    if (!(left > -1.0))
      throw std::domain_error(
          "eta_weighted_integral: divergent endpoint (e + 2s <= -1 at a = 0)");
    // eta^{e+2s} becomes the left Jacobi weight exactly.
    return jacobi_panel(0.0, b, s, left, q, [&](double eta) {
      return std::pow(b + eta, s) * f(eta);
    });
  }

  if (b <= 4.0 * a) {
    return jacobi_panel(a, b, s, s, q, [&](double eta) {
      return std::pow(eta, e) * std::pow(eta + a, s) * std::pow(b + eta, s) *
             f(eta);
    });
  }

  // b/a large: peel the endpoint zones, cover the middle dyadically so the
  // eta^e factor has bounded variation on each piece.
  double total = 0.0;
  total += jacobi_panel(a, 2.0 * a, 0.0, s, q, [&](double eta) {
    return std::pow(eta, e) * std::pow(eta + a, s) * std::pow(b - eta, s) *
           std::pow(b + eta, s) * f(eta);
  });
  auto full = [&](double eta) {
    return std::pow(eta, e) * std::pow(eta * eta - a * a, s) *
           std::pow(b * b - eta * eta, s) * f(eta);
  };
  double lo = 2.0 * a;
  const double cut = 0.5 * b;
  while (lo < cut) {
    double hi = std::min(2.0 * lo, cut);
    total += legendre_panel(lo, hi, q, full);
    lo = hi;
  }
  total += jacobi_panel(cut, b, s, 0.0, q, [&](double eta) {
    return std::pow(eta, e) * std::pow(eta - a, s) * std::pow(eta + a, s) *
           std::pow(b + eta, s) * f(eta);
  });
  return total;
}

namespace {

struct Segment {
  double lo, hi, value, error;
  int depth;
};

void gauss_estimate(const std::function<double(double)>& f, double lo,
                    double hi, double& value, double& error) {
  const GaussRule& fine = gauss_legendre(15);
  const GaussRule& coarse = gauss_legendre(7);
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  double v15 = 0.0;
  for (int i = 0; i < 15; ++i)
    v15 += fine.weights[i] * f(mid + half * fine.nodes[i]);
  double v7 = 0.0;
  for (int i = 0; i < 7; ++i)
    v7 += coarse.weights[i] * f(mid + half * coarse.nodes[i]);
  value = v15 * half;
  error = std::abs(v15 - v7) * half;
}

}  // namespace

IntegrationResult adaptive_integrate(const std::function<double(double)>& f,
                                     double a, double b,
                                     const AdaptiveOptions& opt) {
  IntegrationResult res;
  if (a == b) return res;
  if (a > b) {
    res = adaptive_integrate(f, b, a, opt);
    res.value = -res.value;
    return res;
  }

  std::vector<double> cuts{a, b};
  for (double x : opt.breakpoints)
    if (x > a && x < b) cuts.push_back(x);
  for (double x : opt.singular_points)
    if (x >= a && x <= b) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  auto is_singular = [&](double x) {
    for (double sp : opt.singular_points)
      if (sp == x) return true;
    return false;
  };

  // Pre-split: geometric grading into singular endpoints, then adaptive
  // refinement of every piece.
  std::vector<Segment> work;
  auto push_plain = [&](double lo, double hi) {
    if (hi > lo) work.push_back({lo, hi, 0.0, 0.0, 0});
  };
  // Innermost graded slivers are clamped to a few hundred ulp so Gauss
  // nodes cannot round onto the singular endpoint itself.
  auto graded_into = [&](double from, double far, double w) {
    double sgn = far > from ? 1.0 : -1.0;
    double min_w =
        512.0 * std::numeric_limits<double>::epsilon() *
        std::max({1.0, std::abs(from), std::abs(far)});
    double first = std::max(w * std::ldexp(1.0, -opt.graded_levels), min_w);
    double prev = from + sgn * first;
    if (sgn * (far - prev) <= 0.0) {
      push_plain(std::min(from, far), std::max(from, far));
      return;
    }
    push_plain(std::min(from, prev), std::max(from, prev));
    for (int lev = opt.graded_levels; lev >= 1; --lev) {
      double next = from + sgn * w * std::ldexp(1.0, -(lev - 1));
      if (sgn * (next - prev) <= 0.0) continue;
      push_plain(std::min(prev, next), std::max(prev, next));
      prev = next;
    }
  };
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    double lo = cuts[k], hi = cuts[k + 1];
    bool sl = is_singular(lo), sr = is_singular(hi);
    double width = hi - lo;
    if (sl && sr) {
      double mid = 0.5 * (lo + hi);
      graded_into(lo, mid, 0.5 * width);
      graded_into(hi, mid, 0.5 * width);
    } else if (sl || sr) {
      double from = sl ? lo : hi;
      double to = sl ? hi : lo;
      graded_into(from, to, width);
    } else {
      push_plain(lo, hi);
    }
  }

  // First sweep for a magnitude scale.
  double scale = 0.0;
  double open_error = 0.0;
  for (auto& seg : work) {
    gauss_estimate(f, seg.lo, seg.hi, seg.value, seg.error);
    res.evaluations += 22;
    scale += std::abs(seg.value);
    open_error += seg.error;
  }

  // Global greedy refinement: always split the segment with the largest
  // error until the error sum meets the budget. A segment at max depth,
  // or so thin that splitting would round Gauss nodes onto its endpoints,
  // is parked and refinement continues elsewhere; a hard split cap bounds
  // the work on hostile integrands.
  auto by_error = [](const Segment& x, const Segment& y) {
    return x.error < y.error;
  };
  std::priority_queue<Segment, std::vector<Segment>, decltype(by_error)>
      open(by_error, std::move(work));
  std::vector<Segment> done;
  double done_error = 0.0;
  long splits = 0;
  const long split_cap = 20000;
  while (!open.empty() && splits < split_cap) {
    double budget = std::max(opt.abs_tol, opt.rel_tol * scale);
    if (open_error + done_error <= budget) break;
    Segment seg = open.top();
    if (seg.depth >= opt.max_depth ||
        seg.hi - seg.lo <= 512.0 * std::numeric_limits<double>::epsilon() *
                               std::max(std::abs(seg.lo), std::abs(seg.hi))) {
      open.pop();
      open_error -= seg.error;
      done_error += seg.error;
      done.push_back(seg);
      continue;
    }
    open.pop();
    open_error -= seg.error;
    ++splits;
    double mid = 0.5 * (seg.lo + seg.hi);
    Segment l{seg.lo, mid, 0.0, 0.0, seg.depth + 1};
    Segment r{mid, seg.hi, 0.0, 0.0, seg.depth + 1};
    gauss_estimate(f, l.lo, l.hi, l.value, l.error);
    gauss_estimate(f, r.lo, r.hi, r.value, r.error);
    res.evaluations += 44;
    scale += std::abs(l.value) + std::abs(r.value) - std::abs(seg.value);
    open_error += l.error + r.error;
    open.push(l);
    open.push(r);
  }
  while (!open.empty()) {
    done.push_back(open.top());
    open.pop();
  }
  for (const auto& seg : done) {
    res.value += seg.value;
    res.error += seg.error;
  }
  res.converged = res.error <= std::max(opt.abs_tol, opt.rel_tol * scale);
  return res;
}

}
