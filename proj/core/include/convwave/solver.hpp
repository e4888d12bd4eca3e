#pragma once
// Explicit time-domain solver for the radially reduced equation
//   u_tt - u_rr - ((n-1)/r) u_r = (1+t)^{-2} (V_gamma * u^2) u
// and its damped companion
//   v_tt - v_rr - ((n-1)/r) v_r + (mu/(1+t)) v_t = (V_gamma * v^2) v,
// related by u = (1+t)^{mu/2} v at mu = 2. Data is (0, eps g).
//
// Blow-up is detected by sup-norm growth: crossing times of successive
// doublings over the data's sup-norm are recorded, and the trigger level
// is bracketed by the last two of them.

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "convwave/exponents.hpp"
#include "convwave/fields.hpp"
#include "convwave/kernel_matrix.hpp"

namespace convwave {

struct SolverConfig {
  double dr = 1.0 / 64;
  double r_max = 16.0;
  double dt = 0.0;   // <= 0: cfl * dr
  double cfl = 0.5;  // must be <= 0.9
  // Absolute sup-norm trigger; <= 0 selects 10^3 x the data sup-norm
  // (max of |u(0)| and |u_t(0)| over the grid).
  double blowup_threshold = 0.0;
  double t_max = 2.0;
  // Monitoring ray r = probe_slope * t + probe_offset. slope < 0 selects
  // the default ray 2(1+delta)t (2t + R on the line); slope = 0 with
  // offset 0 disables the probe and with it the domain margin check
  // r_max >= probe(t_max) + t_max.
  double probe_slope = -1.0;
  double probe_offset = 0.0;
  int snapshot_stride = 1;     // record every k-th step
  bool record_frames = true;   // false: keep only counters and records
  bool source_enabled = true;  // false: linear (free) equation
  KernelSettings kernel;

  /// Flat JSON, keys matching the field names ("kernel" is nested);
  /// unknown keys rejected.
  static SolverConfig from_json(std::string_view text);
  std::string to_json() const;
};

/// Throws std::invalid_argument naming the offending field.
void validate_config(const ProblemSpec& spec, const SolverConfig& config);

double resolved_dt(const SolverConfig& config);
/// Probe ray as (slope, offset) with defaults resolved; slope 0, offset 0
/// when disabled.
std::pair<double, double> resolved_probe(const ProblemSpec& spec,
                                         const SolverConfig& config);

/// Default data profile g(r) = A (1+r)^{-(1+nu)}.
double default_data_g(double r, const ProblemSpec& spec);

struct LifespanRecord {
  double eps = 0.0;
  double t_blow_lo = 0.0;
  double t_blow_hi = 0.0;
  bool refined = false;   // bracket shrank >= 25% under dr -> dr/2
  bool triggered = false; // false rows are excluded from sweep fits
  double max_field = 0.0;
  long long steps = 0;
  double threshold = 0.0; // trigger level actually used

  double t_mid() const { return 0.5 * (t_blow_lo + t_blow_hi); }

  static LifespanRecord from_json(std::string_view text);
  std::string to_json() const;
};

struct RunResult {
  SpaceTimeField trajectory;
  std::optional<LifespanRecord> record;  // empty: completed to t_max
  std::vector<double> probe_times;
  std::vector<double> probe_values;
  double max_field = 0.0;
  long long steps = 0;
  // Time-integrated bound on the influence of the data tail beyond r_max:
  // eps * sup_{r > r_max} g * t_max.
  double tail_estimate = 0.0;

  bool triggered() const { return record.has_value(); }
};

/// One leapfrog step. u_prev at t - dt, u_curr at t (t = u_curr.time);
/// returns u at t + dt. The 1/r first-derivative term at r = 0 uses the
/// limit n u_rr(0). Non-finite values pass through untouched; run() does
/// the signaling.
RadialField step(const RadialField& u_prev, const RadialField& u_curr,
                 const KernelMatrix& K, const ProblemSpec& spec,
                 const SolverConfig& config);

/// Same scheme for the damped variant; the mu/(1+t) v_t term is centered
/// (semi-implicit), the source carries no (1+t)^{-2} factor.
RadialField step_damped(const RadialField& v_prev, const RadialField& v_curr,
                        const KernelMatrix& K, const ProblemSpec& spec,
                        const SolverConfig& config);

using FrameSink = std::function<void(const RadialField&)>;

/// March with data (0, eps g). Stops at sup >= threshold, at non-finite
/// values, or at t_max; on a trigger the record brackets the blow-up by
/// the last two doubling times. `kernel` may share a prebuilt matrix on
/// the matching grid; pass nullptr to build one.
RunResult run_with_data(const ProblemSpec& spec, const SolverConfig& config,
                        const std::function<double(double)>& g,
                        const KernelMatrix* kernel = nullptr,
                        const FrameSink& sink = {});

/// run_with_data with the default profile g = A(1+r)^{-(1+nu)}.
RunResult run(const ProblemSpec& spec, const SolverConfig& config,
              const FrameSink& sink = {});

/// Damped-variant march for v with data (0, eps g); u = (1+t) v links the
/// two runs at mu = 2.
RunResult run_damped(const ProblemSpec& spec, const SolverConfig& config,
                     const FrameSink& sink = {});

/// Coarse run plus a dr/2, dt/2 rerun; the returned (coarse) record has
/// `refined` set when the fine bracket is at least 25% narrower.
LifespanRecord run_with_refinement(const ProblemSpec& spec,
                                   const SolverConfig& config);

struct PositivityViolation {
  double r = 0.0;
  double t = 0.0;
  double value = 0.0;
  double bound = 0.0;  // (1-tol) * first_step_lower_bound, 0 for the sign check
};

struct PositivityReport {
  long long points_checked = 0;
  std::vector<PositivityViolation> violations;

  bool clean() const { return violations.empty(); }
};

/// Checks u > 0 and u >= (1-tol) * first_step_lower_bound at every
/// recorded grid point inside the wedge r - t >= max(R, delta t)
/// (x - t >= R on the line).
PositivityReport positivity_monitor(const SpaceTimeField& trajectory,
                                    const ProblemSpec& spec,
                                    double tol = 0.05);

struct SweepResult {
  std::vector<LifespanRecord> records;  // one per spec, in input order
  double slope = 0.0;                   // fit of log t_mid vs log eps
  double intercept = 0.0;
  double theoretical_exponent = 0.0;    // -2/(n - gamma - 2 nu)
  int used = 0;                         // triggered records entering the fit
};

/// Runs every spec (all identical except eps) and fits the power law.
/// Non-triggered runs are flagged in their record and left out of the fit.
/// Runs fan out over the worker pool; the kernel matrix is shared.
SweepResult estimate_lifespan_sweep(const std::vector<ProblemSpec>& specs,
                                    const SolverConfig& config);

/// `levels` applications of the Picard map
///   u -> eps u0 + L((V_gamma * u^2) u)
/// on u_guess's grid and times, through the Duhamel quadratures. Throws
/// std::runtime_error when iterates grow past 1e6 x the data scale
/// (horizon too long for the contraction).
SpaceTimeField picard_iterate(const SpaceTimeField& u_guess,
                              const ProblemSpec& spec,
                              const SolverConfig& config, int levels);

}
