#include "convwave/trajectory_io.hpp"

#include <bit>
#include <cstdint>
#include <stdexcept>

#include "json.hpp"

#include "convwave/version.hpp"

static_assert(std::endian::native == std::endian::little,
              "trajectory records are written in native byte order");

namespace convwave {

namespace {

using nlohmann::json;

json grid_to_json(const RadialGrid& grid) {
  if (grid.kind() == GridKind::Uniform)
    return json{{"kind", "uniform"},
                {"dr", grid.spacing()},
                {"r_max", grid.r_max()}};
  json panels = json::array();
  for (std::size_t p = 0; p < grid.panel_count(); ++p) {
    panels.push_back(
        {{"lo", grid.panel_lo(p)},
         {"hi", grid.panel_hi(p)},
         {"points", grid.panel_end(p) - grid.panel_begin(p)}});
  }
  return json{{"kind", "gauss"}, {"panels", panels}};
}

GridPtr grid_from_json(const json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform") {
    return std::make_shared<const RadialGrid>(RadialGrid::uniform(
        j.at("dr").get<double>(), j.at("r_max").get<double>()));
  }
  if (kind == "gauss") {
    std::vector<PanelSpec> panels;
    for (const auto& p : j.at("panels")) {
      panels.push_back({p.at("lo").get<double>(), p.at("hi").get<double>(),
                        p.at("points").get<int>()});
    }
    return std::make_shared<const RadialGrid>(RadialGrid::gauss_panels(panels));
  }
  throw std::invalid_argument("trajectory header: unknown grid kind \"" +
                              kind + "\"");
}

template <typename T>
void write_pod(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
bool read_pod(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  return static_cast<bool>(in);
}

}  // namespace

TrajectoryWriter::TrajectoryWriter(const std::filesystem::path& file,
                                   const RadialGrid& grid,
                                   const ProblemSpec& spec,
                                   const SolverConfig& config)
    : out_(file, std::ios::binary | std::ios::trunc), count_(grid.size()) {
  if (!out_)
    throw std::runtime_error("trajectory: cannot open " + file.string());
  json header{{"grid", grid_to_json(grid)},
              {"spec", json::parse(spec.to_json())},
              {"config", json::parse(config.to_json())},
              {"version", kVersion}};
  out_ << header.dump() << "\n";
}

void TrajectoryWriter::append(const RadialField& frame) {
  if (frame.values.size() != count_)
    throw std::invalid_argument("trajectory: frame size does not match grid");
  write_pod(out_, frame.time);
  std::uint64_t n = count_;
  write_pod(out_, n);
  out_.write(reinterpret_cast<const char*>(frame.values.data()),
             static_cast<std::streamsize>(n * sizeof(double)));
  if (!out_) throw std::runtime_error("trajectory: write failed");
}

void TrajectoryWriter::flush() { out_.flush(); }

TrajectoryFile read_trajectory(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in)
    throw std::runtime_error("trajectory: cannot open " + file.string());
  std::string header_line;
  if (!std::getline(in, header_line))
    throw std::runtime_error("trajectory: missing header");
  json header = json::parse(header_line);

  TrajectoryFile tf;
  tf.spec = ProblemSpec::from_json(header.at("spec").dump());
  tf.config = SolverConfig::from_json(header.at("config").dump());
  tf.version = header.at("version").get<std::string>();
  tf.field.grid = grid_from_json(header.at("grid"));

  const std::size_t N = tf.field.grid->size();
  double t = 0.0;
  std::uint64_t n = 0;
  while (read_pod(in, t)) {
    if (!read_pod(in, n) || n != N)
      throw std::runtime_error("trajectory: corrupt record");
    std::vector<double> values(N);
    in.read(reinterpret_cast<char*>(values.data()),
            static_cast<std::streamsize>(N * sizeof(double)));
    if (!in) throw std::runtime_error("trajectory: truncated record");
    tf.field.times.push_back(t);
    tf.field.frames.push_back(std::move(values));
  }
  return tf;
}

void append_lifespan_record(const std::filesystem::path& file,
                            const LifespanRecord& record) {
  std::ofstream out(file, std::ios::app);
  if (!out)
    throw std::runtime_error("lifespan records: cannot open " + file.string());
  out << record.to_json() << "\n";
}

std::vector<LifespanRecord> read_lifespan_records(
    const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in)
    throw std::runtime_error("lifespan records: cannot open " + file.string());
  std::vector<LifespanRecord> records;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    records.push_back(LifespanRecord::from_json(line));
  }
  return records;
}

}
