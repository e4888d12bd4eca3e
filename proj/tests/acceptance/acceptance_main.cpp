// End-to-end acceptance gate. Runs nine independent criteria, one line of
// output each: PASS/FAIL, the measured extremes against their tolerances,
// and wall time against the runtime budget. Exceeding the budget fails the
// criterion even when every tolerance holds. Criteria can be selected by
// label on the command line; no arguments runs all nine. Exit 0 iff every
// selected criterion passed.
//
// Tolerances come from the versioned defaults document, the same one
// echoed into run manifests.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "convwave/experiment.hpp"
#include "convwave/exponents.hpp"
#include "convwave/fields.hpp"
#include "convwave/iteration.hpp"
#include "convwave/john_identity.hpp"
#include "convwave/kernel_matrix.hpp"
#include "convwave/oracles.hpp"
#include "convwave/radial_grid.hpp"
#include "convwave/solver.hpp"

using namespace convwave;
using nlohmann::json;

namespace {

const double kPi = std::acos(-1.0);

double u01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += ok ? what : "FAILED " + what;
  }
};

// Test profile shared by the convolution checks: (1-r^2)^2 on [0,1],
// resolved by panels aligned to the support edge, plus a far zone.
double bump(double r) {
  if (r >= 1.0) return 0.0;
  double q = 1.0 - r * r;
  return q * q;
}

GridPtr bump_grid() {
  std::vector<PanelSpec> ps;
  for (int p = 0; p < 8; ++p) ps.push_back({p / 8.0, (p + 1) / 8.0, 10});
  for (int p = 0; p < 4; ++p)
    ps.push_back({1.0 + 0.75 * p, 1.0 + 0.75 * (p + 1), 10});
  return make_grid(RadialGrid::gauss_panels(ps));
}

std::size_t nearest_node(const RadialGrid& g, double r) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < g.size(); ++i)
    if (std::abs(g.nodes()[i] - r) < std::abs(g.nodes()[best] - r)) best = i;
  return best;
}

// 1. Sphere means: interval-kernel reduction vs the polar-angle oracle,
//    50 random polynomial cases per dimension.
Outcome sphere_mean_identity(const json& tol) {
  const double rel_tol = tol.at("identity_rel_tol").get<double>();
  Outcome out;
  std::mt19937_64 rng(2026);
  double worst = 0.0;
  int cases = 0;
  for (int n = 2; n <= 7; ++n)
    for (int c = 0; c < 50; ++c) {
      double r = 0.2 + 4.8 * u01(rng);
      double rho = 0.2 + 4.8 * u01(rng);
      int deg = static_cast<int>(rng() % 5);
      double coef[5] = {};
      for (int k = 0; k <= deg; ++k) coef[k] = 0.1 + 0.9 * u01(rng);
      auto b = [&](double eta) {
        double v = 0.0, p = 1.0;
        for (int k = 0; k <= deg; ++k) {
          v += coef[k] * p;
          p *= eta;
        }
        return v;
      };
      double lhs = john_sphere_mean(b, r, rho, n);
      double rhs = oracle_sphere_quadrature(b, r, rho, n).value;
      worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
      ++cases;
    }
  out.require(worst <= rel_tol, std::to_string(cases) + " cases, worst rel " +
                                    num(worst) + " <= " + num(rel_tol));
  return out;
}

// 2. Radial convolution: matrix operator vs the direct oracles (adaptive
//    in n <= 3, Monte Carlo in n = 4) and the exterior ball closed form.
Outcome radial_convolution(const json& tol) {
  const double rel_tol = tol.at("kernel_rel_tol").get<double>();
  const double mc_sigma = tol.at("kernel_mc_sigma").get<double>();
  const double mc_rel = tol.at("kernel_mc_rel_tol").get<double>();
  const double newton_tol = tol.at("newton_rel_tol").get<double>();
  Outcome out;

  GridPtr g = bump_grid();
  RadialField U = RadialField::sample(g, bump);
  ConvolutionOracleOptions opt;
  opt.support_radius = 1.0;
  opt.breakpoints = {1.0};
  opt.rel_tol = 1e-9;

  const double probes[] = {0.0, 0.6, 0.9, 1.5, 2.9};
  const std::pair<int, double> low_dims[] = {
      {2, 0.5}, {2, 1.0}, {3, 0.5}, {3, 2.0}};
  double worst_low = 0.0;
  for (auto [n, gamma] : low_dims) {
    KernelMatrix K = KernelMatrix::build(g, n, gamma);
    RadialField conv = K.apply(U);
    for (double r : probes) {
      std::size_t i = nearest_node(*g, r);
      OracleResult ref =
          oracle_direct_convolution(bump, g->nodes()[i], n, gamma, opt);
      worst_low = std::max(
          worst_low, std::abs(conv.values[i] - ref.value) / std::abs(ref.value));
    }
  }
  out.require(worst_low <= rel_tol,
              "n<=3 worst rel " + num(worst_low) + " <= " + num(rel_tol));

  KernelMatrix K4 = KernelMatrix::build(g, 4, 1.5);
  RadialField conv4 = K4.apply(U);
  ConvolutionOracleOptions mc = opt;
  mc.mc_samples = 32'000'000;
  mc.seed = 1;
  double worst_se = 0.0, worst_mc_rel = 0.0;
  for (double r : {0.3, 0.5}) {
    std::size_t i = nearest_node(*g, r);
    OracleResult ref =
        oracle_direct_convolution(bump, g->nodes()[i], 4, 1.5, mc);
    double diff = std::abs(conv4.values[i] - ref.value);
    worst_se = std::max(worst_se, diff / ref.error_estimate);
    worst_mc_rel = std::max(worst_mc_rel, diff / std::abs(ref.value));
  }
  out.require(worst_se <= mc_sigma,
              "n=4 worst " + num(worst_se) + " se <= " + num(mc_sigma));
  out.require(worst_mc_rel <= mc_rel,
              "n=4 worst rel " + num(worst_mc_rel) + " <= " + num(mc_rel));

  // unit ball in n=3, gamma=1: exterior value (4 pi / 3) / r; one-point
  // panels pin nodes exactly at the probe radii
  const double h = 0.03125;
  std::vector<PanelSpec> ps;
  for (int p = 0; p < 8; ++p) ps.push_back({p / 8.0, (p + 1) / 8.0, 8});
  ps.push_back({1.0, 1.5 - h, 6});
  ps.push_back({1.5 - h, 1.5 + h, 1});
  ps.push_back({1.5 + h, 2.0 - h, 6});
  ps.push_back({2.0 - h, 2.0 + h, 1});
  ps.push_back({2.0 + h, 4.0 - h, 8});
  ps.push_back({4.0 - h, 4.0 + h, 1});
  GridPtr gb = make_grid(RadialGrid::gauss_panels(ps));
  RadialField ball =
      RadialField::sample(gb, [](double r) { return r < 1.0 ? 1.0 : 0.0; });
  KernelMatrix Kb = KernelMatrix::build(gb, 3, 1.0);
  RadialField convb = Kb.apply(ball);
  double worst_newton = 0.0;
  for (double r : {1.5, 2.0, 4.0}) {
    std::size_t i = nearest_node(*gb, r);
    double exact = 4.0 * kPi / (3.0 * gb->nodes()[i]);
    worst_newton =
        std::max(worst_newton, std::abs(convb.values[i] - exact) / exact);
  }
  out.require(worst_newton <= newton_tol, "ball closed form worst rel " +
                                              num(worst_newton) + " <= " +
                                              num(newton_tol));
  return out;
}

// 3. Exponent sequences: recurrence equals closed form, exact rationals.
Outcome sequence_exactness(const json&) {
  Outcome out;
  std::mt19937_64 rng(29);
  int mismatches = 0;
  for (int tuple = 0; tuple < 20; ++tuple) {
    int n = 1 + static_cast<int>(rng() % 7);
    IterationParams p;
    p.n = n;
    p.gamma = Rational(1 + static_cast<long long>(rng() % (4 * n - 1)), 4);
    p.nu = Rational(1 + static_cast<long long>(rng() % 8), 8);
    p.A = 0.5 + u01(rng);
    p.eps = 0.01 + u01(rng);
    IterationState st = initial_state(p);
    for (int j = 1; j <= 40; ++j) {
      ClosedForm cf = closed_form(j, p);
      if (!(st.a == cf.a) || !(st.b == cf.b) || !(st.d == cf.d)) ++mismatches;
      if (j < 40) st = advance(st);
    }
  }
  out.require(mismatches == 0, "20 tuples, j <= 40, " +
                                   std::to_string(mismatches) + " mismatches");
  return out;
}

// 4. Induction bound: the closed-form lower bound never exceeds the exact
//    log c_j along the recurrence.
Outcome induction_bound(const json& tol) {
  const double slack_tol = tol.at("induction_log_slack").get<double>();
  Outcome out;
  const ProblemSpec points[] = {
      ProblemSpec(3, 1.0, 2.0, 0.5, 8.0, 1.0, 1.0),
      ProblemSpec(2, 0.5, 2.0, 0.25, 4.0, 1.0, 0.5),
      ProblemSpec(5, 1.5, 2.0, 0.5, 2.0, 1.0, 0.25),
  };
  double min_slack = std::numeric_limits<double>::infinity();
  for (const ProblemSpec& spec : points) {
    IterationParams p = IterationParams::from_spec(spec);
    BlowupConstants k = blowup_constants(spec);
    double c1 = p.A * p.eps / 8.0;
    IterationState st = initial_state(p);
    for (int j = 1; j <= 20; ++j) {
      min_slack = std::min(min_slack, st.log_c - c_lower_bound_log(j, k, c1));
      if (j < 20) st = advance(st);
    }
  }
  out.require(min_slack >= -slack_tol, "3 parameter points, j <= 20, min log slack " +
                                           num(min_slack) + " >= -" +
                                           num(slack_tol));
  return out;
}

// 5. Positivity on the exterior wedge, with the first-step lower bound,
//    for the default data in three, two, and one dimensions.
Outcome positivity_wedge(const json& tol) {
  const double ptol = tol.at("positivity_tol").get<double>();
  Outcome out;
  const std::pair<int, double> dims[] = {{3, 1.0}, {2, 1.0}, {1, 0.5}};
  for (auto [n, gamma] : dims) {
    ProblemSpec spec(n, gamma, 2.0, 0.5, 1.0, 1.0, 1e-2);
    SolverConfig c;  // default probe ray on, so the wedge is watched live
    c.dr = 1.0 / 64;
    c.r_max = 8.0;
    c.t_max = 1.0;
    RunResult res = run(spec, c);
    PositivityReport rep = positivity_monitor(res.trajectory, spec, ptol);
    std::string d = "n=" + std::to_string(n) + ": " +
                    std::to_string(rep.points_checked) + " points";
    if (!rep.clean())
      d += ", " + std::to_string(rep.violations.size()) + " violations";
    out.require(rep.points_checked > 1000 && rep.clean(), d);
  }
  return out;
}

// 6. The damped run and the undamped transformed run describe the same
//    solution: u = (1+t) v at matched resolution.
Outcome damping_equivalence(const json& tol) {
  const double rel = tol.at("liouville_rel_tol").get<double>();
  Outcome out;
  ProblemSpec spec(3, 1.0, 2.0, 0.5, 1.0, 1.0, 1e-2);
  SolverConfig c;
  c.dr = 1.0 / 64;
  c.r_max = 6.0;
  c.t_max = 2.0;
  c.probe_slope = 0.0;
  c.probe_offset = 0.0;
  c.snapshot_stride = 4;
  RunResult u = run(spec, c);
  RunResult v = run_damped(spec, c);
  double scale = u.max_field;
  double worst = 0.0;
  std::size_t frames = std::min(u.trajectory.times.size(),
                                v.trajectory.times.size());
  for (std::size_t l = 0; l < frames; ++l) {
    double t = u.trajectory.times[l];
    for (std::size_t i = 0; i < u.trajectory.grid->size(); ++i)
      worst = std::max(worst, std::abs(u.trajectory.frames[l][i] -
                                       (1.0 + t) * v.trajectory.frames[l][i]));
  }
  out.require(scale > 0.0 && worst <= rel * scale,
              "max |u-(1+t)v| / max|u| = " + num(worst / scale) + " <= " +
                  num(rel));
  return out;
}

// 7. Lifespan scaling on the canonical ladder: every rung triggers, the
//    bracket midpoints are monotone, the fitted slope reaches the claimed
//    direction, and halving dr tightens the brackets at both extremes.
Outcome lifespan_scaling(const json& tol) {
  const double margin = tol.at("sweep_slope_margin").get<double>();
  Outcome out;
  ExperimentPlan plan = default_sweep_plan();
  std::vector<ProblemSpec> specs;
  for (double e : plan.eps_ladder)
    specs.emplace_back(plan.spec.n, plan.spec.gamma, plan.spec.mu,
                       plan.spec.nu, plan.spec.A, plan.spec.R, e);
  SweepResult sw = estimate_lifespan_sweep(specs, plan.config);

  int triggered = 0;
  for (const auto& rec : sw.records) triggered += rec.triggered ? 1 : 0;
  out.require(triggered == static_cast<int>(sw.records.size()),
              std::to_string(triggered) + "/" +
                  std::to_string(sw.records.size()) + " triggered");

  // the ladder descends in eps, so midpoints must not descend in time
  bool monotone = true;
  for (std::size_t i = 1; i < sw.records.size(); ++i)
    monotone = monotone &&
               sw.records[i].t_mid() >= sw.records[i - 1].t_mid() - 1e-12;
  out.require(monotone, "t_mid nonincreasing in eps");

  double cap = sw.theoretical_exponent + margin;
  out.require(sw.slope <= cap,
              "fitted slope " + num(sw.slope) + " <= " + num(cap));

  LifespanRecord top = run_with_refinement(specs.front(), plan.config);
  LifespanRecord bottom = run_with_refinement(specs.back(), plan.config);
  out.require(top.refined && bottom.refined,
              "brackets shrink >= 25% under dr/2 at both extremes");
  return out;
}

// 8. Self-convergence on three grids at the final time, away from the
//    outflow boundary: linear regime and nonlinear pre-trigger regime.
Outcome convergence_order(const json& tol) {
  const double lin_req = tol.at("convergence_linear_order").get<double>();
  const double nl_req = tol.at("convergence_nonlinear_order").get<double>();
  Outcome out;
  const double T = 1.0;
  const double r_lim = 4.0 - T - 0.25;

  auto march = [&](double eps, bool source, double dr) {
    ProblemSpec spec(3, 1.0, 2.0, 0.5, 1.0, 1.0, eps);
    SolverConfig c;
    c.dr = dr;
    c.r_max = 4.0;
    c.t_max = T;
    c.probe_slope = 0.0;
    c.probe_offset = 0.0;
    c.source_enabled = source;
    return run(spec, c).trajectory;
  };
  auto order = [&](double eps, bool source) {
    SpaceTimeField f16 = march(eps, source, 1.0 / 16);
    SpaceTimeField f32 = march(eps, source, 1.0 / 32);
    SpaceTimeField f64 = march(eps, source, 1.0 / 64);
    double e1 = 0.0, e2 = 0.0;
    for (double r = 0.0; r <= r_lim + 1e-9; r += 1.0 / 16) {
      e1 = std::max(e1, std::abs(f16.eval(r, T) - f32.eval(r, T)));
      e2 = std::max(e2, std::abs(f32.eval(r, T) - f64.eval(r, T)));
    }
    return std::log2(e1 / e2);
  };

  double lin = order(1e-2, false);
  out.require(lin >= lin_req,
              "linear order " + num(lin) + " >= " + num(lin_req));
  double nl = order(0.5, true);
  out.require(nl >= nl_req,
              "nonlinear order " + num(nl) + " >= " + num(nl_req));
  return out;
}

// 9. The second contraction-map iterate agrees with the marched solution
//    on a short horizon, and the iterates contract.
Outcome picard_consistency(const json& tol) {
  const double rel = tol.at("picard_rel_tol").get<double>();
  Outcome out;
  ProblemSpec spec(3, 1.0, 2.0, 0.5, 1.0, 1.0, 1e-2);
  SolverConfig pc;  // kernel settings for the iterate's convolutions

  GridPtr grid = make_grid(RadialGrid::uniform(1.0 / 64, 2.0));
  std::vector<double> times{0.0, 0.025, 0.05, 0.075, 0.1};
  SpaceTimeField zero = SpaceTimeField::zeros(grid, times);
  SpaceTimeField u1 = picard_iterate(zero, spec, pc, 1);
  SpaceTimeField u2 = picard_iterate(zero, spec, pc, 2);
  SpaceTimeField u3 = picard_iterate(zero, spec, pc, 3);

  double d01 = 0.0, d12 = 0.0, d23 = 0.0;
  for (std::size_t l = 0; l < times.size(); ++l)
    for (std::size_t i = 0; i < grid->size(); ++i) {
      d01 = std::max(d01, std::abs(u1.frames[l][i]));
      d12 = std::max(d12, std::abs(u2.frames[l][i] - u1.frames[l][i]));
      d23 = std::max(d23, std::abs(u3.frames[l][i] - u2.frames[l][i]));
    }

  // reference march on a finer grid, domain wide enough that the outflow
  // boundary cannot reach the compared region within the horizon
  SolverConfig fd;
  fd.dr = 1.0 / 128;
  fd.r_max = 4.0;
  fd.t_max = 0.1;
  fd.probe_slope = 0.0;
  fd.probe_offset = 0.0;
  RunResult ref = run(spec, fd);
  double scale = ref.max_field;
  double worst = 0.0;
  for (std::size_t l = 0; l < times.size(); ++l)
    for (std::size_t i = 0; i < grid->size(); ++i)
      worst = std::max(worst,
                       std::abs(u2.frames[l][i] -
                                ref.trajectory.eval(grid->nodes()[i], times[l])));
  out.require(scale > 0.0 && worst <= rel * scale,
              "second iterate vs march rel " + num(worst / scale) + " <= " +
                  num(rel));
  out.require(d01 > 0.0 && d12 < d01 && d23 < d12,
              "contraction ratios " + num(d12 / d01) + ", " + num(d23 / d12) +
                  " < 1");
  return out;
}

struct Criterion {
  const char* label;
  double budget_s;
  Outcome (*fn)(const json&);
};

const Criterion kCriteria[] = {
    {"sphere-mean-identity", 60, sphere_mean_identity},
    {"radial-convolution", 300, radial_convolution},
    {"sequence-exactness", 1, sequence_exactness},
    {"induction-bound", 1, induction_bound},
    {"positivity-wedge", 600, positivity_wedge},
    {"damping-equivalence", 120, damping_equivalence},
    {"lifespan-scaling", 1800, lifespan_scaling},
    {"convergence-order", 300, convergence_order},
    {"picard-consistency", 180, picard_consistency},
};

}  // namespace

int main(int argc, char** argv) {
  const json tol = json::parse(default_tolerances_json());

  std::vector<const Criterion*> selected;
  if (argc <= 1) {
    for (const Criterion& c : kCriteria) selected.push_back(&c);
  } else {
    for (int i = 1; i < argc; ++i) {
      const Criterion* hit = nullptr;
      for (const Criterion& c : kCriteria)
        if (std::string(argv[i]) == c.label) hit = &c;
      if (!hit) {
        std::fprintf(stderr, "unknown criterion \"%s\"; known:", argv[i]);
        for (const Criterion& c : kCriteria)
          std::fprintf(stderr, " %s", c.label);
        std::fprintf(stderr, "\n");
        return 2;
      }
      selected.push_back(hit);
    }
  }

  int failed = 0;
  for (const Criterion* c : selected) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c->fn(tol);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    double wall = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    bool in_budget = wall <= c->budget_s;
    bool pass = out.pass && in_budget;
    std::printf("%s %-21s %s [wall %.1fs %s budget %gs]\n",
                pass ? "PASS" : "FAIL", c->label, out.detail.c_str(), wall,
                in_budget ? "<=" : "EXCEEDS", c->budget_s);
    std::fflush(stdout);
    if (!pass) ++failed;
  }
  std::printf("acceptance: %zu/%zu criteria passed\n",
              selected.size() - failed, selected.size());
  return failed == 0 ? 0 : 1;
}
