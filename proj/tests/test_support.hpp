#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <string>

#include "perc3d.hpp"

namespace perc3d::testing {

// Image of a vertex under a cube symmetry acting about the box centre.
// Only valid for symmetries that map the box onto itself.
inline Coord map_coord(const BoxShape& shape, const CubeSymmetry& g, const Coord& c) {
  const Offset centred{2 * c[0] - (shape.nx - 1), 2 * c[1] - (shape.ny - 1),
                       2 * c[2] - (shape.nz - 1)};
  const Offset r = g.apply(centred);
  return Coord{(r[0] + shape.nx - 1) / 2, (r[1] + shape.ny - 1) / 2, (r[2] + shape.nz - 1) / 2};
}

inline bool preserves_box(const BoxShape& shape, const CubeSymmetry& g) {
  const std::array<int, 3> ext{shape.nx, shape.ny, shape.nz};
  for (int i = 0; i < 3; ++i) {
    if (ext[i] != ext[g.perm[i]]) return false;
  }
  return true;
}

inline OccupancySample transformed(const OccupancySample& s, const CubeSymmetry& g) {
  const auto shape = s.shape();
  auto out = OccupancySample::closed(shape, s.kind());
  for (std::size_t v = 0; v < shape.vertex_count(); ++v) {
    const Coord c = shape.coord(v);
    if (s.kind() == PercolationKind::site) {
      out.set_site(shape.index(map_coord(shape, g, c)), s.site_open(v));
      continue;
    }
    for (int axis = 0; axis < 3; ++axis) {
      if (!s.has_bond(v, axis) || !s.bond_open(v, axis)) continue;
      Coord d = c;
      d[axis] += 1;
      out.open_edge(map_coord(shape, g, c), map_coord(shape, g, d));
    }
  }
  return out;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::path(PERC3D_TEST_TMP) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Writes a finalized record file whose events hold exactly on `event_seeds`.
inline void write_synthetic_run(const ExperimentConfig& cfg,
                                const std::set<std::uint64_t>& event_seeds) {
  std::ofstream out(cfg.output, std::ios::trunc);
  out << kConfigPrefix << cfg.to_json().dump() << "\n";
  std::size_t successes = 0;
  for (std::uint64_t seed = cfg.base_seed; seed <= cfg.last_seed(); ++seed) {
    TrialRecord r;
    r.seed = seed;
    r.event = event_seeds.count(seed) > 0;
    r.digest = cfg.digest();
    successes += r.event;
    out << r.to_line() << "\n";
  }
  nlohmann::ordered_json summary;
  summary["digest"] = cfg.digest();
  summary["trials"] = cfg.trials;
  summary["successes"] = successes;
  out << kSummaryPrefix << summary.dump() << "\n";
}

inline ExperimentConfig make_config(Direction mode, PercolationKind kind, int scale,
                                    const std::string& p, std::size_t trials,
                                    std::uint64_t base_seed, const std::filesystem::path& output) {
  ExperimentConfig cfg;
  cfg.mode = mode;
  cfg.kind = kind;
  cfg.scale = scale;
  cfg.p_text = p;
  cfg.trials = trials;
  cfg.base_seed = base_seed;
  cfg.output = output;
  return cfg;
}

}  // namespace perc3d::testing

namespace perc3d {

// Readable parameter values in test listings.
inline void PrintTo(PercolationKind kind, std::ostream* os) { *os << to_string(kind); }

}  // namespace perc3d
