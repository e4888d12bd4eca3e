#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "convwave/experiment.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw std::invalid_argument("--plan: cannot open \"" + path + "\"");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

bool given(const CLI::App* sub, const std::string& name) {
  const CLI::Option* opt = sub->get_option_no_throw(name);
  return opt && opt->count() > 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "radial blow-up laboratory for the damped wave equation with a "
      "cubic convolution nonlinearity"};
  app.require_subcommand(1);

  std::string plan_file;
  std::string out_dir;
  int n = 0;
  double gamma = 0.0, nu = 0.0, eps = 0.0, mu = 0.0;
  std::uint64_t seed = 0;
  int jmax = 0;

  const struct {
    const char* name;
    const char* help;
  } kinds[] = {
      {"verify-identity",
       "cross-check sphere means against the angular quadrature oracle"},
      {"verify-kernel",
       "cross-check the convolution matrix against direct oracles"},
      {"verify-sequences",
       "check the iteration recurrences against their closed forms"},
      {"simulate", "run the radial finite difference solver"},
      {"lifespan-sweep",
       "bracket blow-up times over an epsilon ladder and fit the scaling"},
      {"exponents", "print the critical exponents for (n, gamma, mu)"},
  };
  for (const auto& k : kinds) {
    CLI::App* sub = app.add_subcommand(k.name, k.help);
    sub->add_option("--plan", plan_file, "JSON plan file");
    sub->add_option("--n", n, "spatial dimension");
    sub->add_option("--gamma", gamma, "potential exponent in (0, n)");
    sub->add_option("--nu", nu, "data decay rate");
    sub->add_option("--eps", eps, "data amplitude");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "random seed");
    if (std::string(k.name) == "verify-sequences")
      sub->add_option("--jmax", jmax, "iteration depth");
    if (std::string(k.name) == "exponents")
      sub->add_option("--mu", mu, "damping coefficient");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string kind =
      sub->get_name() == "exponents" ? "exponents-report" : sub->get_name();

  try {
    convwave::ExperimentPlan plan;
    if (given(sub, "--plan"))
      plan = convwave::ExperimentPlan::from_json(slurp(plan_file));
    else if (kind == "lifespan-sweep")
      plan = convwave::default_sweep_plan();
    plan.kind = kind;
    if (given(sub, "--n") || given(sub, "--gamma") || given(sub, "--nu") ||
        given(sub, "--eps") || given(sub, "--mu")) {
      const convwave::ProblemSpec& s = plan.spec;
      plan.spec = convwave::ProblemSpec(
          given(sub, "--n") ? n : s.n, given(sub, "--gamma") ? gamma : s.gamma,
          given(sub, "--mu") ? mu : s.mu, given(sub, "--nu") ? nu : s.nu, s.A,
          s.R, given(sub, "--eps") ? eps : s.eps);
    }
    if (given(sub, "--out")) plan.output_dir = out_dir;
    if (given(sub, "--seed")) plan.seed = seed;
    if (given(sub, "--jmax")) plan.jmax = jmax;

    convwave::RunArtifacts art = convwave::execute_plan(plan);
    std::cout << art.summary << "\n";
    std::cerr << "artifacts: " << art.dir.string() << "\n";
    return art.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
