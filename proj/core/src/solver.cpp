#include "convwave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>

#include "json.hpp"

#include "convwave/iteration.hpp"
#include "convwave/parallel.hpp"
#include "convwave/wave_rep.hpp"

namespace convwave {

namespace {

using nlohmann::json;

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
  throw std::invalid_argument("SolverConfig." + field + ": " + why);
}

// u_rr + ((n-1)/r) u_r; the r = 0 node uses the limit n u_rr(0) with the
// symmetry ghost u(-dr) = u(dr). Last node is left to the outflow update.
void radial_laplacian(const std::vector<double>& u,
                      const std::vector<double>& nodes, int n, double dr,
                      std::vector<double>& lap) {
  const std::size_t N = u.size();
  const double inv2 = 1.0 / (dr * dr);
  lap[0] = n * 2.0 * (u[1] - u[0]) * inv2;
  for (std::size_t i = 1; i + 1 < N; ++i) {
    lap[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * inv2 +
             (n - 1) / nodes[i] * (u[i + 1] - u[i - 1]) / (2.0 * dr);
  }
  lap[N - 1] = 0.0;
}

RadialField step_core(const RadialField& prev, const RadialField& curr,
                      const KernelMatrix* K, const ProblemSpec& spec,
                      const SolverConfig& config, bool damped) {
  if (!prev.grid || !curr.grid)
    throw std::invalid_argument("step: fields without a grid");
  if (!prev.grid->same_layout(*curr.grid))
    throw std::invalid_argument("step: field grids differ");
  if (K && !curr.grid->same_layout(*K->grid()))
    throw std::invalid_argument("step: grid does not match the kernel");
  const auto& nodes = curr.grid->nodes();
  const std::size_t N = nodes.size();
  if (N < 3) throw std::invalid_argument("step: grid too small");
  const double dr = curr.grid->spacing();
  const double dt = resolved_dt(config);
  const double t = curr.time;

  std::vector<double> lap(N);
  radial_laplacian(curr.values, nodes, spec.n, dr, lap);

  std::vector<double> src;
  if (config.source_enabled && K) {
    RadialField usq(curr.grid, std::vector<double>(N), t);
    for (std::size_t i = 0; i < N; ++i)
      usq.values[i] = curr.values[i] * curr.values[i];
    RadialField conv = K->apply(usq);
    src.resize(N);
    const double fac = damped ? 1.0 : 1.0 / ((1.0 + t) * (1.0 + t));
    for (std::size_t i = 0; i < N; ++i)
      src[i] = fac * conv.values[i] * curr.values[i];
  }

  RadialField next(curr.grid, std::vector<double>(N), t + dt);
  const double dt2 = dt * dt;
  if (!damped) {
    for (std::size_t i = 0; i + 1 < N; ++i) {
      double rhs = lap[i] + (src.empty() ? 0.0 : src[i]);
      next.values[i] = 2.0 * curr.values[i] - prev.values[i] + dt2 * rhs;
    }
  } else {
    // damping centered: (1+beta) u^+ = 2u - (1-beta) u^- + dt^2 rhs
    const double beta = 0.5 * spec.mu * dt / (1.0 + t);
    for (std::size_t i = 0; i + 1 < N; ++i) {
      double rhs = lap[i] + (src.empty() ? 0.0 : src[i]);
      next.values[i] = (2.0 * curr.values[i] -
                        (1.0 - beta) * prev.values[i] + dt2 * rhs) /
                       (1.0 + beta);
    }
  }

  // First-order outflow on w = r^{(n-1)/2} u at the truncation radius.
  // The damped form relaxes outgoing amplitudes, w_t + w_r = -mu w/(2(1+t));
  // the integrating factor ((1+t)/(1+t+dt))^{mu/2} applies that exactly.
  const double p = 0.5 * (spec.n - 1);
  const double wN = std::pow(nodes[N - 1], p) * curr.values[N - 1];
  const double wM = std::pow(nodes[N - 2], p) * curr.values[N - 2];
  const double c = dt / dr;
  double w_next = wN - c * (wN - wM);
  if (damped)
    w_next *= std::pow((1.0 + t) / (1.0 + t + dt), 0.5 * spec.mu);
  next.values[N - 1] = w_next / std::pow(nodes[N - 1], p);
  return next;
}

RunResult march(const ProblemSpec& spec, const SolverConfig& config,
                const std::function<double(double)>& g,
                const KernelMatrix* kernel, const FrameSink& sink,
                bool damped) {
  validate_config(spec, config);
  if (!g) throw std::invalid_argument("run: data profile g required");

  GridPtr grid;
  std::optional<KernelMatrix> own;
  const KernelMatrix* K = kernel;
  if (K) {
    grid = K->grid();
    if (K->dimension() != spec.n || K->gamma() != spec.gamma)
      throw std::invalid_argument("run: kernel built for different (n, gamma)");
  } else {
    grid = std::make_shared<const RadialGrid>(
        RadialGrid::uniform(config.dr, config.r_max));
    if (config.source_enabled) {
      own.emplace(spec.n == 1
                      ? KernelMatrix::build_line(grid, spec.gamma, config.kernel)
                      : KernelMatrix::build(grid, spec.n, spec.gamma,
                                            config.kernel));
      K = &*own;
    }
  }

  const auto& nodes = grid->nodes();
  const std::size_t N = nodes.size();
  const double dt = resolved_dt(config);
  auto [probe_slope, probe_offset] = resolved_probe(spec, config);

  std::vector<double> gv(N);
  double gmax = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    gv[i] = spec.eps * g(nodes[i]);
    gmax = std::max(gmax, std::abs(gv[i]));
  }

  const double base = gmax;  // sup over the data levels; u(0) is zero
  const double threshold =
      config.blowup_threshold > 0.0
          ? config.blowup_threshold
          : (base > 0.0 ? 1e3 * base
                        : std::numeric_limits<double>::infinity());

  RadialField prev(grid, std::vector<double>(N, 0.0), 0.0);
  RadialField curr(grid, std::vector<double>(N), dt);
  // Taylor start: u(dt) = dt u_t(0) + (dt^2/2) u_tt(0); u_tt(0) vanishes
  // for the undamped form and equals -mu u_t(0) for the damped one.
  const double start_fac = damped ? 1.0 - 0.5 * spec.mu * dt : 1.0;
  for (std::size_t i = 0; i < N; ++i) curr.values[i] = dt * gv[i] * start_fac;

  RunResult res;
  res.tail_estimate = std::abs(spec.eps * g(config.r_max)) * config.t_max;
  res.max_field = curr.max_abs();

  auto record_frame = [&](const RadialField& f) {
    if (config.record_frames) {
      res.trajectory.times.push_back(f.time);
      res.trajectory.frames.push_back(f.values);
    }
    if (sink) sink(f);
  };
  res.trajectory.grid = grid;
  record_frame(prev);
  if (config.snapshot_stride == 1) record_frame(curr);

  auto probe_sample = [&](const RadialField& f) {
    if (probe_slope == 0.0 && probe_offset == 0.0) return;
    double r = probe_slope * f.time + probe_offset;
    if (r > grid->r_max()) return;
    res.probe_times.push_back(f.time);
    res.probe_values.push_back(f(r));
  };
  probe_sample(curr);

  std::vector<double> doubling_times;
  double next_level = 2.0 * base;

  long long k = 1;
  bool triggered = false;
  double trigger_time = 0.0;
  while (curr.time < config.t_max - 1e-9 * config.t_max) {
    RadialField next = step_core(prev, curr, K, spec, config, damped);
    ++k;
    res.steps = k - 1;
    double sup = next.max_abs();
    if (!std::isfinite(sup)) {
      triggered = true;
      trigger_time = next.time;
      break;
    }
    res.max_field = std::max(res.max_field, sup);
    if (base > 0.0) {
      while (sup >= next_level && next_level <= threshold) {
        doubling_times.push_back(next.time);
        next_level *= 2.0;
      }
    }
    probe_sample(next);
    if (sup >= threshold) {
      triggered = true;
      trigger_time = next.time;
      record_frame(next);
      prev = std::move(curr);
      curr = std::move(next);
      break;
    }
    bool last = next.time >= config.t_max - 1e-9 * config.t_max;
    if (k % config.snapshot_stride == 0 || last) record_frame(next);
    prev = std::move(curr);
    curr = std::move(next);
  }

  if (triggered) {
    LifespanRecord rec;
    rec.eps = spec.eps;
    rec.triggered = true;
    rec.threshold = threshold;
    rec.max_field = res.max_field;
    rec.steps = res.steps;
    rec.t_blow_hi = trigger_time;
    rec.t_blow_lo = std::max(0.0, trigger_time - dt);
    for (auto it = doubling_times.rbegin(); it != doubling_times.rend(); ++it) {
      if (*it < trigger_time) {
        rec.t_blow_lo = *it;
        break;
      }
    }
    if (rec.t_blow_lo >= rec.t_blow_hi)
      rec.t_blow_lo = std::max(0.0, rec.t_blow_hi - dt);
    res.record = rec;
  }
  return res;
}

// Strict-key JSON helpers shared by the config and record parsers.
json parse_object(std::string_view text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw std::invalid_argument(std::string(what) + ": not a JSON object");
  return j;
}

template <typename T>
void take(json& j, const char* key, T& out) {
  auto it = j.find(key);
  if (it == j.end()) return;
  out = it->get<T>();
  j.erase(it);
}

void reject_leftovers(const json& j, const char* what) {
  if (!j.empty())
    throw std::invalid_argument(std::string(what) + ": unknown key \"" +
                                j.begin().key() + "\"");
}

}  // namespace

SolverConfig SolverConfig::from_json(std::string_view text) {
  json j = parse_object(text, "SolverConfig");
  SolverConfig c;
  take(j, "dr", c.dr);
  take(j, "r_max", c.r_max);
  take(j, "dt", c.dt);
  take(j, "cfl", c.cfl);
  take(j, "blowup_threshold", c.blowup_threshold);
  take(j, "t_max", c.t_max);
  take(j, "probe_slope", c.probe_slope);
  take(j, "probe_offset", c.probe_offset);
  take(j, "snapshot_stride", c.snapshot_stride);
  take(j, "record_frames", c.record_frames);
  take(j, "source_enabled", c.source_enabled);
  if (auto it = j.find("kernel"); it != j.end()) {
    json k = *it;
    if (!k.is_object())
      throw std::invalid_argument("SolverConfig.kernel: not a JSON object");
    take(k, "eta_points", c.kernel.eta_points);
    take(k, "near_points", c.kernel.near_points);
    take(k, "graded_levels", c.kernel.graded_levels);
    take(k, "panel_error_tol", c.kernel.panel_error_tol);
    reject_leftovers(k, "SolverConfig.kernel");
    j.erase(it);
  }
  reject_leftovers(j, "SolverConfig");
  return c;
}

std::string SolverConfig::to_json() const {
  json j{{"dr", dr},
         {"r_max", r_max},
         {"dt", dt},
         {"cfl", cfl},
         {"blowup_threshold", blowup_threshold},
         {"t_max", t_max},
         {"probe_slope", probe_slope},
         {"probe_offset", probe_offset},
         {"snapshot_stride", snapshot_stride},
         {"record_frames", record_frames},
         {"source_enabled", source_enabled},
         {"kernel",
          {{"eta_points", kernel.eta_points},
           {"near_points", kernel.near_points},
           {"graded_levels", kernel.graded_levels},
           {"panel_error_tol", kernel.panel_error_tol}}}};
  return j.dump();
}

LifespanRecord LifespanRecord::from_json(std::string_view text) {
  json j = parse_object(text, "LifespanRecord");
  LifespanRecord r;
  take(j, "eps", r.eps);
  take(j, "t_blow_lo", r.t_blow_lo);
  take(j, "t_blow_hi", r.t_blow_hi);
  take(j, "refined", r.refined);
  take(j, "triggered", r.triggered);
  take(j, "max_field", r.max_field);
  take(j, "steps", r.steps);
  take(j, "threshold", r.threshold);
  reject_leftovers(j, "LifespanRecord");
  return r;
}

std::string LifespanRecord::to_json() const {
  json j{{"eps", eps},
         {"t_blow_lo", t_blow_lo},
         {"t_blow_hi", t_blow_hi},
         {"refined", refined},
         {"triggered", triggered},
         {"max_field", max_field},
         {"steps", steps},
         {"threshold", threshold}};
  return j.dump();
}

void validate_config(const ProblemSpec& spec, const SolverConfig& config) {
  if (!(config.dr > 0.0)) bad_field("dr", "must be > 0");
  if (!(config.r_max > 2.0 * config.dr))
    bad_field("r_max", "must exceed 2 dr");
  if (!(config.cfl > 0.0) || config.cfl > 0.9)
    bad_field("cfl", "must lie in (0, 0.9]");
  if (config.dt > 0.0 && config.dt > config.cfl * config.dr * (1.0 + 1e-12))
    bad_field("dt", "must satisfy dt <= cfl * dr");
  if (!(config.t_max > 0.0)) bad_field("t_max", "must be > 0");
  if (config.snapshot_stride < 1) bad_field("snapshot_stride", "must be >= 1");
  auto [slope, offset] = resolved_probe(spec, config);
  if (slope != 0.0 || offset != 0.0) {
    double need = slope * config.t_max + offset + config.t_max;
    if (config.r_max < need - 1e-12)
      bad_field("r_max", "domain-of-dependence margin: need r_max >= probe(t_max) + t_max");
  }
}

double resolved_dt(const SolverConfig& config) {
  return config.dt > 0.0 ? config.dt : config.cfl * config.dr;
}

std::pair<double, double> resolved_probe(const ProblemSpec& spec,
                                         const SolverConfig& config) {
  if (config.probe_slope >= 0.0)
    return {config.probe_slope, config.probe_offset};
  if (spec.n == 1) return {2.0, spec.R};
  return {2.0 * (1.0 + sigma_delta(spec.n)), 0.0};
}

double default_data_g(double r, const ProblemSpec& spec) {
  return spec.A * std::pow(1.0 + r, -(1.0 + spec.nu));
}

RadialField step(const RadialField& u_prev, const RadialField& u_curr,
                 const KernelMatrix& K, const ProblemSpec& spec,
                 const SolverConfig& config) {
  return step_core(u_prev, u_curr, &K, spec, config, false);
}

RadialField step_damped(const RadialField& v_prev, const RadialField& v_curr,
                        const KernelMatrix& K, const ProblemSpec& spec,
                        const SolverConfig& config) {
  return step_core(v_prev, v_curr, &K, spec, config, true);
}

RunResult run_with_data(const ProblemSpec& spec, const SolverConfig& config,
                        const std::function<double(double)>& g,
                        const KernelMatrix* kernel, const FrameSink& sink) {
  return march(spec, config, g, kernel, sink, false);
}

RunResult run(const ProblemSpec& spec, const SolverConfig& config,
              const FrameSink& sink) {
  return march(
      spec, config, [&](double r) { return default_data_g(r, spec); },
      nullptr, sink, false);
}

RunResult run_damped(const ProblemSpec& spec, const SolverConfig& config,
                     const FrameSink& sink) {
  return march(
      spec, config, [&](double r) { return default_data_g(r, spec); },
      nullptr, sink, true);
}

LifespanRecord run_with_refinement(const ProblemSpec& spec,
                                   const SolverConfig& config) {
  SolverConfig coarse_cfg = config;
  coarse_cfg.record_frames = false;
  RunResult coarse = run(spec, coarse_cfg);
  LifespanRecord rec;
  if (coarse.record) {
    rec = *coarse.record;
  } else {
    rec.eps = spec.eps;
    rec.triggered = false;
    rec.t_blow_lo = rec.t_blow_hi = config.t_max;
    rec.max_field = coarse.max_field;
    rec.steps = coarse.steps;
    return rec;
  }

  SolverConfig fine_cfg = coarse_cfg;
  fine_cfg.dr = 0.5 * config.dr;
  if (config.dt > 0.0) fine_cfg.dt = 0.5 * config.dt;
  RunResult fine = run(spec, fine_cfg);
  if (fine.record) {
    double wc = rec.t_blow_hi - rec.t_blow_lo;
    double wf = fine.record->t_blow_hi - fine.record->t_blow_lo;
    rec.refined = wf <= 0.75 * wc;
  }
  return rec;
}

PositivityReport positivity_monitor(const SpaceTimeField& trajectory,
                                    const ProblemSpec& spec, double tol) {
  if (!trajectory.grid)
    throw std::invalid_argument("positivity_monitor: trajectory without grid");
  PositivityReport report;
  const auto& nodes = trajectory.grid->nodes();
  const double delta = spec.n == 1 ? 0.0 : sigma_delta(spec.n);
  for (std::size_t l = 0; l < trajectory.times.size(); ++l) {
    double t = trajectory.times[l];
    const auto& frame = trajectory.frames[l];
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      double r = nodes[i];
      bool inside = spec.n == 1 ? (r - t >= spec.R)
                                : in_sigma(r, t, spec.R, delta);
      if (!inside) continue;
      ++report.points_checked;
      double u = frame[i];
      if (!(u > 0.0) && t > 0.0)
        report.violations.push_back({r, t, u, 0.0});
      double bound = (1.0 - tol) * first_step_lower_bound(r, t, spec);
      if (u < bound) report.violations.push_back({r, t, u, bound});
    }
  }
  return report;
}

SweepResult estimate_lifespan_sweep(const std::vector<ProblemSpec>& specs,
                                    const SolverConfig& config) {
  if (specs.empty())
    throw std::invalid_argument("estimate_lifespan_sweep: no specs");
  for (const auto& s : specs) {
    if (s.n != specs[0].n || s.gamma != specs[0].gamma ||
        s.mu != specs[0].mu || s.nu != specs[0].nu || s.A != specs[0].A ||
        s.R != specs[0].R)
      throw std::invalid_argument(
          "estimate_lifespan_sweep: specs must differ only in eps");
  }
  validate_config(specs[0], config);

  SolverConfig run_cfg = config;
  run_cfg.record_frames = false;

  GridPtr grid = std::make_shared<const RadialGrid>(
      RadialGrid::uniform(config.dr, config.r_max));
  std::optional<KernelMatrix> K;
  if (config.source_enabled) {
    K.emplace(specs[0].n == 1
                  ? KernelMatrix::build_line(grid, specs[0].gamma,
                                             config.kernel)
                  : KernelMatrix::build(grid, specs[0].n, specs[0].gamma,
                                        config.kernel));
  }

  SweepResult out;
  out.records.resize(specs.size());
  parallel_for(specs.size(), [&](std::size_t i) {
    RunResult rr = march(
        specs[i], run_cfg,
        [&](double r) { return default_data_g(r, specs[i]); },
        K ? &*K : nullptr, {}, false);
    if (rr.record) {
      out.records[i] = *rr.record;
    } else {
      LifespanRecord rec;
      rec.eps = specs[i].eps;
      rec.triggered = false;
      rec.t_blow_lo = rec.t_blow_hi = config.t_max;
      rec.max_field = rr.max_field;
      rec.steps = rr.steps;
      out.records[i] = rec;
    }
  });

  double p = specs[0].n - specs[0].gamma - 2.0 * specs[0].nu;
  out.theoretical_exponent = -2.0 / p;

  // least squares of log t_mid on log eps over the triggered rows
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& rec : out.records) {
    if (!rec.triggered || !(rec.t_mid() > 0.0)) continue;
    double x = std::log(rec.eps);
    double y = std::log(rec.t_mid());
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  out.used = m;
  if (m >= 2) {
    double denom = m * sxx - sx * sx;
    out.slope = (m * sxy - sx * sy) / denom;
    out.intercept = (sy - out.slope * sx) / m;
  }
  return out;
}

SpaceTimeField picard_iterate(const SpaceTimeField& u_guess,
                              const ProblemSpec& spec,
                              const SolverConfig& config, int levels) {
  if (levels < 1)
    throw std::invalid_argument("picard_iterate: levels >= 1 required");
  if (!u_guess.grid)
    throw std::invalid_argument("picard_iterate: guess without grid");
  if (u_guess.times.empty())
    throw std::invalid_argument("picard_iterate: guess without times");

  GridPtr grid = u_guess.grid;
  const auto& nodes = grid->nodes();
  const std::size_t N = nodes.size();
  const std::size_t T = u_guess.times.size();

  KernelMatrix K =
      spec.n == 1 ? KernelMatrix::build_line(grid, spec.gamma, config.kernel)
                  : KernelMatrix::build(grid, spec.n, spec.gamma,
                                        config.kernel);

  auto gfun = [&](double r) { return default_data_g(r, spec); };

  // free part eps u0, shared by every level
  std::vector<std::vector<double>> u0(T, std::vector<double>(N));
  parallel_for(T * N, [&](std::size_t idx) {
    std::size_t l = idx / N, i = idx % N;
    u0[l][i] = free_solution_u0({}, gfun, spec, nodes[i], u_guess.times[l]);
  });

  double scale = 0.0;
  for (const auto& row : u0)
    for (double v : row) scale = std::max(scale, std::abs(v));
  scale = std::max({scale, u_guess.max_abs(), 1e-300});

  WaveQuadOptions opt;
  SpaceTimeField cur = u_guess;
  for (int lev = 0; lev < levels; ++lev) {
    SpaceTimeField F;
    F.grid = grid;
    F.times = cur.times;
    F.frames.assign(T, std::vector<double>(N));
    for (std::size_t l = 0; l < T; ++l) {
      RadialField usq(grid, std::vector<double>(N), cur.times[l]);
      for (std::size_t i = 0; i < N; ++i)
        usq.values[i] = cur.frames[l][i] * cur.frames[l][i];
      RadialField conv = K.apply(usq);
      for (std::size_t i = 0; i < N; ++i)
        F.frames[l][i] = conv.values[i] * cur.frames[l][i];
    }
    SourceFn sf = SourceFn::from_field(F);

    SpaceTimeField next = SpaceTimeField::zeros(grid, cur.times);
    parallel_for(T * N, [&](std::size_t idx) {
      std::size_t l = idx / N, i = idx % N;
      double t = cur.times[l];
      double duh = 0.0;
      if (t > 0.0) {
        if (spec.n == 1)
          duh = duhamel_term_line(nodes[i], t, sf, spec, opt).value;
        else if (spec.n % 2 == 1)
          duh = duhamel_term_odd(nodes[i], t, sf, spec, opt).value;
        else
          duh = duhamel_term_even(nodes[i], t, sf, spec, opt).value;
      }
      next.frames[l][i] = u0[l][i] + duh;
    });
    if (!(next.max_abs() <= 1e6 * scale))
      throw std::runtime_error(
          "picard_iterate: iterates diverging; shorten the horizon");
    cur = std::move(next);
  }
  return cur;
}

}
