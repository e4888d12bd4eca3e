#include "convwave/exponents.hpp"

#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace convwave {

using nlohmann::json;

ProblemSpec::ProblemSpec(int n_, double gamma_, double mu_, double nu_,
                         double A_, double R_, double eps_)
    : n(n_), gamma(gamma_), mu(mu_), nu(nu_), A(A_), R(R_), eps(eps_) {
  if (n < 1) throw std::invalid_argument("ProblemSpec: n must be >= 1");
  if (!(gamma > 0.0) || !(gamma < static_cast<double>(n)))
    throw std::invalid_argument("ProblemSpec: gamma must lie in (0, n)");
  if (!(mu >= 0.0)) throw std::invalid_argument("ProblemSpec: mu must be >= 0");
  if (!(nu > 0.0)) throw std::invalid_argument("ProblemSpec: nu must be > 0");
  if (!(A > 0.0)) throw std::invalid_argument("ProblemSpec: A must be > 0");
  if (!(R > 0.0)) throw std::invalid_argument("ProblemSpec: R must be > 0");
  if (!(eps > 0.0)) throw std::invalid_argument("ProblemSpec: eps must be > 0");
}

ProblemSpec ProblemSpec::from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& err) {
    throw std::invalid_argument(std::string("ProblemSpec: malformed JSON: ") +
                                err.what());
  }
  if (!j.is_object()) throw std::invalid_argument("ProblemSpec: expected object");
  static const char* known[] = {"n", "gamma", "mu", "nu", "a", "r", "eps"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok)
      throw std::invalid_argument("ProblemSpec: unknown key \"" + it.key() + "\"");
  }
  for (const char* k : known)
    if (!j.contains(k))
      throw std::invalid_argument(std::string("ProblemSpec: missing key \"") + k +
                                  "\"");
  return ProblemSpec(j.at("n").get<int>(), j.at("gamma").get<double>(),
                     j.at("mu").get<double>(), j.at("nu").get<double>(),
                     j.at("a").get<double>(), j.at("r").get<double>(),
                     j.at("eps").get<double>());
}

std::string ProblemSpec::to_json() const {
  json j;
  j["n"] = n;
  j["gamma"] = gamma;
  j["mu"] = mu;
  j["nu"] = nu;
  j["a"] = A;
  j["r"] = R;
  j["eps"] = eps;
  return j.dump();
}

ExtendedReal strauss_exponent(int n) {
  if (n < 1) throw std::invalid_argument("strauss_exponent: n must be >= 1");
  if (n == 1) return ExtendedReal::inf();
  double disc = std::sqrt(static_cast<double>(n) * n + 10.0 * n - 7.0);
  return ExtendedReal::finite((n + 1.0 + disc) / (2.0 * (n - 1.0)));
}

double fujita_exponent(int n) {
  if (n < 1) throw std::invalid_argument("fujita_exponent: n must be >= 1");
  return 1.0 + 2.0 / static_cast<double>(n);
}

double critical_decay(int n, double gamma, double mu) {
  if (n < 1) throw std::invalid_argument("critical_decay: n must be >= 1");
  if (!(gamma > 0.0) || !(gamma < static_cast<double>(n)))
    throw std::invalid_argument("critical_decay: gamma must lie in (0, n)");
  return 0.5 * (n + 2.0 - mu - gamma);
}

RadialField liouville_forward(const RadialField& v, double t, double mu) {
  if (!(t >= 0.0)) throw std::invalid_argument("liouville_forward: t must be >= 0");
  RadialField u = v;
  double s = std::pow(1.0 + t, 0.5 * mu);
  for (double& x : u.values) x *= s;
  u.time = t;
  return u;
}

RadialField liouville_inverse(const RadialField& u, double t, double mu) {
  if (!(t >= 0.0)) throw std::invalid_argument("liouville_inverse: t must be >= 0");
  RadialField v = u;
  double s = std::pow(1.0 + t, -0.5 * mu);
  for (double& x : v.values) x *= s;
  v.time = t;
  return v;
}

SpaceTimeField scale_transform(const SpaceTimeField& u, double sigma, int n,
                               double gamma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("scale_transform: sigma must be > 0");
  if (!(gamma > 0.0) || !(gamma < static_cast<double>(n)))
    throw std::invalid_argument("scale_transform: gamma must lie in (0, n)");
  SpaceTimeField out;
  out.grid = make_grid(u.grid->scaled(1.0 / sigma));
  out.times.reserve(u.times.size());
  for (double t : u.times) out.times.push_back(t / sigma);
  double amp = std::pow(sigma, 1.0 + 0.5 * (n - gamma));
  out.frames = u.frames;
  for (auto& fr : out.frames)
    for (double& v : fr) v *= amp;
  return out;
}

}
