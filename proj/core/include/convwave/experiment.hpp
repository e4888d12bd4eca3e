#pragma once
// Reproducible experiment plans. A plan names one of the six run kinds,
// carries the problem spec, solver config, seed, and output directory;
// executing it writes <output_dir>/<kind>/<timestamp>/ holding
// manifest.json plus the result artifacts (results.csv or results.jsonl,
// trajectory.bin, fit.json as applicable). Result files are
// bit-reproducible given the same seed and config.

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "convwave/exponents.hpp"
#include "convwave/solver.hpp"

namespace convwave {

struct ExperimentPlan {
  std::string kind = "simulate";  // see kPlanKinds
  ProblemSpec spec;
  SolverConfig config;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "out";
  int jmax = 40;                    // verify-sequences depth
  int cases_per_dimension = 50;     // verify-identity draws per n
  std::vector<double> eps_ladder;   // lifespan-sweep; empty selects default

  static ExperimentPlan from_json(std::string_view text);
  std::string to_json() const;
};

inline constexpr const char* kPlanKinds[] = {
    "verify-identity", "verify-kernel",  "verify-sequences",
    "simulate",        "lifespan-sweep", "exponents-report"};

bool is_plan_kind(std::string_view kind);

/// Canonical lifespan-sweep plan: the quarter-octave epsilon ladder and a
/// domain deep enough that the focusing cascade, not the outer boundary,
/// sets each trigger time. The CLI uses it when no plan file is given.
ExperimentPlan default_sweep_plan();

/// The versioned tolerance defaults (single JSON document), echoed into
/// every manifest.
std::string default_tolerances_json();

struct RunArtifacts {
  std::filesystem::path dir;
  std::vector<std::string> files;  // names relative to dir
  int exit_code = 0;               // 0 success, 1 verification failure
  std::string summary;             // printable result digest
};

/// Executes the plan. Throws std::invalid_argument on configuration
/// errors (unknown kind, bad spec/config fields).
RunArtifacts execute_plan(const ExperimentPlan& plan);

}
