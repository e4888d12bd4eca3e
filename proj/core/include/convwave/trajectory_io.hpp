#pragma once
// Trajectory files: one UTF-8 JSON header line holding the grid, the
// problem spec, the solver config, and the code version, then append-only
// binary records. Record layout, little endian:
//   f64 t | u64 count | count x f64 values
// Lifespan records go to JSON-lines files, one document per line.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "convwave/fields.hpp"
#include "convwave/solver.hpp"

namespace convwave {

class TrajectoryWriter {
 public:
  TrajectoryWriter(const std::filesystem::path& file, const RadialGrid& grid,
                   const ProblemSpec& spec, const SolverConfig& config);

  void append(const RadialField& frame);
  void flush();

 private:
  std::ofstream out_;
  std::size_t count_;
};

struct TrajectoryFile {
  SpaceTimeField field;
  ProblemSpec spec;
  SolverConfig config;
  std::string version;
};

TrajectoryFile read_trajectory(const std::filesystem::path& file);

void append_lifespan_record(const std::filesystem::path& file,
                            const LifespanRecord& record);
std::vector<LifespanRecord> read_lifespan_records(
    const std::filesystem::path& file);

}
