#include "convwave/experiment.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

#include "convwave/iteration.hpp"
#include "convwave/john_identity.hpp"
#include "convwave/oracles.hpp"
#include "convwave/trajectory_io.hpp"
#include "convwave/version.hpp"
#include "convwave/wave_rep.hpp"

namespace convwave {

namespace {

using nlohmann::json;

// Single source of the default tolerances; version bumps on any change.
constexpr const char* kDefaults = R"({
  "version": 2,
  "identity_rel_tol": 1e-6,
  "kernel_rel_tol": 1e-6,
  "kernel_mc_sigma": 3.0,
  "kernel_mc_rel_tol": 1e-3,
  "newton_rel_tol": 1e-8,
  "induction_log_slack": 1e-12,
  "functional_root_tol": 1e-9,
  "positivity_tol": 0.05,
  "liouville_rel_tol": 1e-3,
  "sweep_slope_margin": 0.3,
  "convergence_linear_order": 1.8,
  "convergence_nonlinear_order": 1.5,
  "picard_rel_tol": 1e-3,
  "sweep_eps_top": 0.044194173824159216,
  "sweep_eps_ratio": 0.8408964152537145,
  "sweep_points": 6
})";

const json& defaults() {
  static const json j = json::parse(kDefaults);
  return j;
}

std::string fmt(double x) {
  std::array<char, 64> buf;
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), p);
}

double u01(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1p-53;
}

// RFC 4180: comma separated, CRLF line endings, header written by caller.
class CsvWriter {
 public:
  explicit CsvWriter(const std::filesystem::path& file)
      : out_(file, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open " + file.string());
  }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out_ << ',';
      out_ << fields[i];
    }
    out_ << "\r\n";
  }

 private:
  std::ofstream out_;
};

std::filesystem::path make_run_dir(const ExperimentPlan& plan) {
  auto now = std::chrono::system_clock::now();
  std::time_t tt = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y%m%dT%H%M%SZ", &tm);
  std::filesystem::path base = plan.output_dir / plan.kind;
  std::filesystem::path dir = base / stamp;
  for (int k = 1; std::filesystem::exists(dir); ++k)
    dir = base / (std::string(stamp) + "-" + std::to_string(k));
  std::filesystem::create_directories(dir);
  return dir;
}

struct CaseOutcome {
  int failures = 0;
  int total = 0;
  std::vector<std::string> failure_lines;

  void tally(bool pass, const std::string& label) {
    ++total;
    if (!pass) {
      ++failures;
      failure_lines.push_back(label);
    }
  }
  std::string digest(const std::string& what) const {
    std::ostringstream os;
    os << what << ": " << total << " cases, " << failures << " failures";
    for (const auto& l : failure_lines) os << "\n  FAIL " << l;
    return os.str();
  }
};

void run_verify_identity(const ExperimentPlan& plan,
                         const std::filesystem::path& dir, RunArtifacts& art) {
  const double tol = defaults().at("identity_rel_tol").get<double>();
  std::mt19937_64 rng(plan.seed);
  CsvWriter csv(dir / "results.csv");
  art.files.push_back("results.csv");
  csv.row({"n", "case", "r", "rho", "degree", "identity", "oracle", "rel_err",
           "pass"});
  CaseOutcome out;
  for (int n = 2; n <= 7; ++n) {
    for (int c = 0; c < plan.cases_per_dimension; ++c) {
      double r = 0.2 + 4.8 * u01(rng);
      double rho = 0.2 + 4.8 * u01(rng);
      int deg = static_cast<int>(rng() % 5);
      std::array<double, 5> coef{};
      for (int k = 0; k <= deg; ++k) coef[k] = 0.1 + 0.9 * u01(rng);
      auto b = [&](double eta) {
        double v = 0.0, p = 1.0;
        for (int k = 0; k <= deg; ++k) {
          v += coef[k] * p;
          p *= eta;
        }
        return v;
      };
      double idv = john_sphere_mean(b, r, rho, n);
      OracleResult orc = oracle_sphere_quadrature(b, r, rho, n);
      double rel = std::abs(idv - orc.value) / std::abs(orc.value);
      bool pass = rel <= tol;
      out.tally(pass, "identity n=" + std::to_string(n) + " case=" +
                          std::to_string(c) + " rel=" + fmt(rel));
      csv.row({std::to_string(n), std::to_string(c), fmt(r), fmt(rho),
               std::to_string(deg), fmt(idv), fmt(orc.value), fmt(rel),
               pass ? "1" : "0"});
    }
  }
  art.exit_code = out.failures ? 1 : 0;
  art.summary = out.digest("john identity vs sphere oracle");
}

GridPtr bump_grid() {
  std::vector<PanelSpec> ps;
  for (int p = 0; p < 8; ++p) ps.push_back({p / 8.0, (p + 1) / 8.0, 10});
  for (int p = 0; p < 4; ++p)
    ps.push_back({1.0 + 0.75 * p, 1.0 + 0.75 * (p + 1), 10});
  return std::make_shared<const RadialGrid>(RadialGrid::gauss_panels(ps));
}

// Contiguous panels whose one-point members put nodes exactly at the
// Newton-potential target radii.
GridPtr newton_grid() {
  const double h = 0.03125;  // 2^-5, exactly representable edges
  std::vector<PanelSpec> ps;
  for (int p = 0; p < 8; ++p) ps.push_back({p / 8.0, (p + 1) / 8.0, 8});
  ps.push_back({1.0, 1.5 - h, 6});
  ps.push_back({1.5 - h, 1.5 + h, 1});
  ps.push_back({1.5 + h, 2.0 - h, 6});
  ps.push_back({2.0 - h, 2.0 + h, 1});
  ps.push_back({2.0 + h, 4.0 - h, 8});
  ps.push_back({4.0 - h, 4.0 + h, 1});
  return std::make_shared<const RadialGrid>(RadialGrid::gauss_panels(ps));
}

std::size_t nearest_node(const RadialGrid& grid, double r) {
  const auto& nodes = grid.nodes();
  std::size_t best = 0;
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (std::abs(nodes[i] - r) < std::abs(nodes[best] - r)) best = i;
  return best;
}

void run_verify_kernel(const ExperimentPlan& plan,
                       const std::filesystem::path& dir, RunArtifacts& art) {
  const double tol = defaults().at("kernel_rel_tol").get<double>();
  const double mc_sigma = defaults().at("kernel_mc_sigma").get<double>();
  const double mc_rel = defaults().at("kernel_mc_rel_tol").get<double>();
  const double newton_tol = defaults().at("newton_rel_tol").get<double>();

  CsvWriter csv(dir / "results.csv");
  art.files.push_back("results.csv");
  csv.row({"case", "n", "gamma", "r", "value", "reference", "stderr",
           "rel_err", "pass"});
  CaseOutcome out;

  auto bump = [](double r) {
    if (r >= 1.0) return 0.0;
    double q = 1.0 - r * r;
    return q * q;
  };
  GridPtr grid = bump_grid();
  RadialField U = RadialField::sample(grid, bump);
  const double targets[] = {0.0, 0.4, 0.9, 1.5, 3.0};

  ConvolutionOracleOptions oopt;
  oopt.support_radius = 1.0;
  oopt.breakpoints = {1.0};
  oopt.rel_tol = 1e-9;
  oopt.seed = plan.seed;

  for (int n : {2, 3}) {
    for (double gamma : {0.5, 1.0, n - 0.5}) {
      KernelMatrix K = KernelMatrix::build(grid, n, gamma, plan.config.kernel);
      RadialField conv = K.apply(U);
      for (double rt : targets) {
        std::size_t i = nearest_node(*grid, rt);
        double r = grid->nodes()[i];
        OracleResult ref = oracle_direct_convolution(bump, r, n, gamma, oopt);
        double rel = std::abs(conv.values[i] - ref.value) /
                     std::abs(ref.value);
        bool pass = rel <= tol;
        out.tally(pass, "kernel n=" + std::to_string(n) + " gamma=" +
                            fmt(gamma) + " r=" + fmt(r) + " rel=" + fmt(rel));
        csv.row({"adaptive", std::to_string(n), fmt(gamma), fmt(r),
                 fmt(conv.values[i]), fmt(ref.value), fmt(ref.error_estimate),
                 fmt(rel), pass ? "1" : "0"});
      }
    }
  }

  {
    const int n = 4;
    const double gamma = 1.5;
    KernelMatrix K = KernelMatrix::build(grid, n, gamma, plan.config.kernel);
    RadialField conv = K.apply(U);
    for (double rt : {0.5, 2.0}) {
      std::size_t i = nearest_node(*grid, rt);
      double r = grid->nodes()[i];
      OracleResult ref = oracle_direct_convolution(bump, r, n, gamma, oopt);
      double diff = std::abs(conv.values[i] - ref.value);
      double rel = diff / std::abs(ref.value);
      bool pass = diff <= mc_sigma * ref.error_estimate && rel <= mc_rel;
      out.tally(pass, "kernel-mc n=4 gamma=" + fmt(gamma) + " r=" + fmt(r) +
                          " rel=" + fmt(rel) + " sigmas=" +
                          fmt(ref.error_estimate > 0
                                  ? diff / ref.error_estimate
                                  : 0.0));
      csv.row({"monte-carlo", "4", fmt(gamma), fmt(r), fmt(conv.values[i]),
               fmt(ref.value), fmt(ref.error_estimate), fmt(rel),
               pass ? "1" : "0"});
    }
  }

  {
    GridPtr ngrid = newton_grid();
    auto ball = [](double r) { return r < 1.0 ? 1.0 : 0.0; };
    RadialField ind = RadialField::sample(ngrid, ball);
    KernelMatrix K = KernelMatrix::build(ngrid, 3, 1.0, plan.config.kernel);
    RadialField conv = K.apply(ind);
    const double four_pi_3 = 4.0 * std::acos(-1.0) / 3.0;
    for (double rt : {1.5, 2.0, 4.0}) {
      std::size_t i = nearest_node(*ngrid, rt);
      double expected = four_pi_3 / rt;
      double rel = std::abs(conv.values[i] - expected) / expected;
      bool pass = rel <= newton_tol;
      out.tally(pass, "newton r=" + fmt(rt) + " rel=" + fmt(rel));
      csv.row({"newton", "3", "1", fmt(rt), fmt(conv.values[i]),
               fmt(expected), "0", fmt(rel), pass ? "1" : "0"});
    }
  }

  art.exit_code = out.failures ? 1 : 0;
  art.summary = out.digest("radial convolution vs direct oracle");
}

void run_verify_sequences(const ExperimentPlan& plan,
                          const std::filesystem::path& dir,
                          RunArtifacts& art) {
  const double slack_tol = defaults().at("induction_log_slack").get<double>();
  const double root_tol = defaults().at("functional_root_tol").get<double>();
  if (plan.jmax < 1)
    throw std::invalid_argument("ExperimentPlan.jmax: must be >= 1");

  IterationParams params = IterationParams::from_spec(plan.spec);
  BlowupConstants k = blowup_constants(plan.spec);
  const double c1 = params.A * params.eps / 8.0;

  std::ofstream jsonl(dir / "results.jsonl");
  art.files.push_back("results.jsonl");
  CaseOutcome out;

  IterationState st = initial_state(params);
  for (int j = 1; j <= plan.jmax; ++j) {
    ClosedForm cf = closed_form(j, params);
    bool exact = st.a == cf.a && st.b == cf.b && st.d == cf.d;
    json row{{"j", j},     {"a", st.a.str()},     {"b", st.b.str()},
             {"d", st.d.str()}, {"log_c", st.log_c}, {"exact", exact}};
    out.tally(exact, "sequence j=" + std::to_string(j));
    if (j <= 20) {
      double bound = c_lower_bound_log(j, k, c1);
      row["bound_log"] = bound;
      bool ok = st.log_c - bound >= -slack_tol;
      out.tally(ok, "induction j=" + std::to_string(j) + " slack=" +
                        fmt(st.log_c - bound));
    }
    jsonl << row.dump() << "\n";
    if (j < plan.jmax) st = advance(st);
  }

  double p = plan.spec.n - plan.spec.gamma - 2.0 * plan.spec.nu;
  if (p > 0.0 && plan.spec.eps <= k.eps0) {
    double t_star = lifespan_upper_bound(plan.spec, k);
    if (t_star >= admissible_time_threshold(plan.spec)) {
      double kz = blowup_functional_K(t_star, plan.spec.eps, k, plan.spec);
      bool ok = std::abs(kz) <= root_tol;
      out.tally(ok, "functional root K(T)=" + fmt(kz));
      jsonl << json{{"summary", true},
                    {"lifespan_bound", t_star},
                    {"K_at_root", kz}}
                   .dump()
            << "\n";
    }
  }

  art.exit_code = out.failures ? 1 : 0;
  art.summary = out.digest("sequence recurrences vs closed forms");
}

void run_simulate(const ExperimentPlan& plan, const std::filesystem::path& dir,
                  RunArtifacts& art) {
  validate_config(plan.spec, plan.config);
  GridPtr grid = std::make_shared<const RadialGrid>(
      RadialGrid::uniform(plan.config.dr, plan.config.r_max));
  TrajectoryWriter tw(dir / "trajectory.bin", *grid, plan.spec, plan.config);
  art.files.push_back("trajectory.bin");
  RunResult rr = run(plan.spec, plan.config,
                     [&](const RadialField& f) { tw.append(f); });
  tw.flush();

  std::ofstream jsonl(dir / "results.jsonl");
  art.files.push_back("results.jsonl");
  json summary{{"completed", !rr.triggered()},
               {"max_field", rr.max_field},
               {"steps", rr.steps},
               {"tail_estimate", rr.tail_estimate}};
  if (plan.config.record_frames) {
    PositivityReport rep = positivity_monitor(
        rr.trajectory, plan.spec, defaults().at("positivity_tol").get<double>());
    summary["positivity_points"] = rep.points_checked;
    summary["positivity_violations"] = rep.violations.size();
  }
  jsonl << summary.dump() << "\n";
  if (rr.record) jsonl << rr.record->to_json() << "\n";

  if (!rr.probe_times.empty()) {
    CsvWriter probe(dir / "probe.csv");
    art.files.push_back("probe.csv");
    probe.row({"t", "u"});
    for (std::size_t i = 0; i < rr.probe_times.size(); ++i)
      probe.row({fmt(rr.probe_times[i]), fmt(rr.probe_values[i])});
  }
  art.summary = "simulate: " + summary.dump();
}

void run_lifespan_sweep(const ExperimentPlan& plan,
                        const std::filesystem::path& dir, RunArtifacts& art) {
  std::vector<double> ladder = plan.eps_ladder;
  if (ladder.empty()) {
    const json& d = defaults();
    double eps = d.at("sweep_eps_top").get<double>();
    double ratio = d.at("sweep_eps_ratio").get<double>();
    int points = d.at("sweep_points").get<int>();
    for (int i = 0; i < points; ++i, eps *= ratio) ladder.push_back(eps);
  }
  std::vector<ProblemSpec> specs;
  for (double e : ladder)
    specs.emplace_back(plan.spec.n, plan.spec.gamma, plan.spec.mu,
                       plan.spec.nu, plan.spec.A, plan.spec.R, e);
  SweepResult sw = estimate_lifespan_sweep(specs, plan.config);

  CsvWriter csv(dir / "results.csv");
  art.files.push_back("results.csv");
  csv.row({"eps", "t_lo", "t_hi", "t_mid", "triggered"});
  for (const auto& rec : sw.records)
    csv.row({fmt(rec.eps), fmt(rec.t_blow_lo), fmt(rec.t_blow_hi),
             fmt(rec.t_mid()), rec.triggered ? "1" : "0"});

  json fit{{"slope", sw.slope},
           {"intercept", sw.intercept},
           {"theoretical_exponent", sw.theoretical_exponent},
           {"used", sw.used},
           {"points", sw.records.size()}};
  std::ofstream(dir / "fit.json") << fit.dump(2) << "\n";
  art.files.push_back("fit.json");
  art.summary = "lifespan sweep: " + fit.dump();
}

void run_exponents_report(const ExperimentPlan& plan,
                          const std::filesystem::path& dir,
                          RunArtifacts& art) {
  const ProblemSpec& s = plan.spec;
  json out{{"n", s.n},
           {"gamma", s.gamma},
           {"mu", s.mu},
           {"nu_c", critical_decay(s.n, s.gamma, s.mu)},
           {"fujita", fujita_exponent(s.n)}};
  ExtendedReal st = strauss_exponent(s.n);
  if (st.infinite)
    out["strauss"] = "infinity";
  else
    out["strauss"] = st.value;
  std::ofstream(dir / "results.json") << out.dump(2) << "\n";
  art.files.push_back("results.json");
  art.summary = out.dump();
}

}  // namespace

bool is_plan_kind(std::string_view kind) {
  for (const char* k : kPlanKinds)
    if (kind == k) return true;
  return false;
}

ExperimentPlan default_sweep_plan() {
  ExperimentPlan plan;
  plan.kind = "lifespan-sweep";
  const json& d = defaults();
  double eps = d.at("sweep_eps_top").get<double>();
  double ratio = d.at("sweep_eps_ratio").get<double>();
  int points = d.at("sweep_points").get<int>();
  for (int i = 0; i < points; ++i, eps *= ratio)
    plan.eps_ladder.push_back(eps);
  // At these amplitudes the trigger time reaches several hundred; the
  // domain must extend past it so the data tail keeps feeding the focus,
  // and the origin probe replaces full frame capture.
  plan.config.dr = 0.25;
  plan.config.r_max = 760.0;
  plan.config.t_max = 700.0;
  plan.config.probe_slope = 0.0;
  plan.config.probe_offset = 0.0;
  plan.config.record_frames = false;
  return plan;
}

std::string default_tolerances_json() { return defaults().dump(2); }

ExperimentPlan ExperimentPlan::from_json(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw std::invalid_argument("ExperimentPlan: not a JSON object");
  ExperimentPlan plan;
  if (auto it = j.find("kind"); it != j.end()) {
    plan.kind = it->get<std::string>();
    j.erase(it);
  }
  if (!is_plan_kind(plan.kind))
    throw std::invalid_argument("ExperimentPlan.kind: unknown \"" +
                                plan.kind + "\"");
  if (auto it = j.find("spec"); it != j.end()) {
    plan.spec = ProblemSpec::from_json(it->dump());
    j.erase(it);
  }
  if (auto it = j.find("config"); it != j.end()) {
    plan.config = SolverConfig::from_json(it->dump());
    j.erase(it);
  }
  if (auto it = j.find("seed"); it != j.end()) {
    plan.seed = it->get<std::uint64_t>();
    j.erase(it);
  }
  if (auto it = j.find("output_dir"); it != j.end()) {
    plan.output_dir = it->get<std::string>();
    j.erase(it);
  }
  if (auto it = j.find("jmax"); it != j.end()) {
    plan.jmax = it->get<int>();
    j.erase(it);
  }
  if (auto it = j.find("cases_per_dimension"); it != j.end()) {
    plan.cases_per_dimension = it->get<int>();
    j.erase(it);
  }
  if (auto it = j.find("eps_ladder"); it != j.end()) {
    plan.eps_ladder = it->get<std::vector<double>>();
    j.erase(it);
  }
  if (!j.empty())
    throw std::invalid_argument("ExperimentPlan: unknown key \"" +
                                j.begin().key() + "\"");
  return plan;
}

std::string ExperimentPlan::to_json() const {
  json j{{"kind", kind},
         {"spec", json::parse(spec.to_json())},
         {"config", json::parse(config.to_json())},
         {"seed", seed},
         {"output_dir", output_dir.string()},
         {"jmax", jmax},
         {"cases_per_dimension", cases_per_dimension},
         {"eps_ladder", eps_ladder}};
  return j.dump();
}

RunArtifacts execute_plan(const ExperimentPlan& plan) {
  if (!is_plan_kind(plan.kind))
    throw std::invalid_argument("ExperimentPlan.kind: unknown \"" +
                                plan.kind + "\"");
  auto t0 = std::chrono::steady_clock::now();
  RunArtifacts art;
  art.dir = make_run_dir(plan);

  if (plan.kind == "verify-identity")
    run_verify_identity(plan, art.dir, art);
  else if (plan.kind == "verify-kernel")
    run_verify_kernel(plan, art.dir, art);
  else if (plan.kind == "verify-sequences")
    run_verify_sequences(plan, art.dir, art);
  else if (plan.kind == "simulate")
    run_simulate(plan, art.dir, art);
  else if (plan.kind == "lifespan-sweep")
    run_lifespan_sweep(plan, art.dir, art);
  else
    run_exponents_report(plan, art.dir, art);

  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                              t0)
                    .count();
  json manifest{{"plan", json::parse(plan.to_json())},
                {"defaults", defaults()},
                {"version", kVersion},
                {"wall_seconds", wall},
                {"results", art.files},
                {"exit_code", art.exit_code}};
  std::ofstream(art.dir / "manifest.json") << manifest.dump(2) << "\n";
  return art;
}

}
