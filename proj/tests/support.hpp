#pragma once

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "nbv/fov.hpp"
#include "nbv/grid_map.hpp"
#include "nbv/world.hpp"

namespace nbv::test {

/// Builds a Grid2D from top-down ASCII rows: '.' free, 'X' occupied,
/// 'U' unknown, 'S' source (free). All rows must have equal length.
inline Grid2D grid_from_ascii(const std::vector<std::string>& rows) {
  Grid2D g;
  g.height = static_cast<int>(rows.size());
  g.width = static_cast<int>(rows.front().size());
  g.cells.assign(static_cast<size_t>(g.width) * g.height, CellState::Free);
  for (int y = 0; y < g.height; ++y) {
    const std::string& row = rows[g.height - 1 - y];  // rows are top-down
    if (static_cast<int>(row.size()) != g.width) throw std::runtime_error("ragged grid");
    for (int x = 0; x < g.width; ++x) {
      switch (row[x]) {
        case '.': g.set(x, y, CellState::Free); break;
        case 'X': g.set(x, y, CellState::Occupied); break;
        case 'U': g.set(x, y, CellState::Unknown); break;
        case 'S':
          g.set(x, y, CellState::Free);
          g.src_x = x;
          g.src_y = y;
          break;
        default: throw std::runtime_error("bad grid char");
      }
    }
  }
  return g;
}

/// Random grid with the source at the center, guaranteed non-Occupied.
inline Grid2D random_grid(std::mt19937_64& rng, int w, int h, double occupancy) {
  Grid2D g;
  g.width = w;
  g.height = h;
  g.src_x = w / 2;
  g.src_y = h / 2;
  g.cells.resize(static_cast<size_t>(w) * h);
  for (auto& c : g.cells) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u < occupancy) c = CellState::Occupied;
    else c = (rng() & 1) ? CellState::Free : CellState::Unknown;
  }
  g.set(g.src_x, g.src_y, CellState::Free);
  return g;
}

/// The 8 dihedral transforms of the square grid (rotations + reflections).
/// Index 0 is the identity.
inline Grid2D transform_grid(const Grid2D& g, int t) {
  auto map_xy = [&](int x, int y, int& ox, int& oy, int& ow, int& oh) {
    const int w = g.width, h = g.height;
    switch (t) {
      case 0: ox = x; oy = y; ow = w; oh = h; break;                    // identity
      case 1: ox = h - 1 - y; oy = x; ow = h; oh = w; break;            // rot90
      case 2: ox = w - 1 - x; oy = h - 1 - y; ow = w; oh = h; break;    // rot180
      case 3: ox = y; oy = w - 1 - x; ow = h; oh = w; break;            // rot270
      case 4: ox = w - 1 - x; oy = y; ow = w; oh = h; break;            // mirror x
      case 5: ox = x; oy = h - 1 - y; ow = w; oh = h; break;            // mirror y
      case 6: ox = y; oy = x; ow = h; oh = w; break;                    // transpose
      case 7: ox = h - 1 - y; oy = w - 1 - x; ow = h; oh = w; break;    // anti-transpose
      default: throw std::runtime_error("bad transform");
    }
  };
  int ow, oh, sx, sy;
  map_xy(g.src_x, g.src_y, sx, sy, ow, oh);
  Grid2D out;
  out.width = ow;
  out.height = oh;
  out.src_x = sx;
  out.src_y = sy;
  out.cells.assign(static_cast<size_t>(ow) * oh, CellState::Free);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      int ox, oy, w2, h2;
      map_xy(x, y, ox, oy, w2, h2);
      out.set(ox, oy, g.at(x, y));
    }
  }
  return out;
}

/// Reveals ground truth into a map: every voxel overlapping an obstacle
/// becomes Occupied, everything else Free. Fixture shortcut for tests that
/// need a fully known map.
inline void reveal_ground_truth(OccupancyMap& map, const World& world) {
  for (int z = 0; z < map.nz(); ++z) {
    for (int y = 0; y < map.ny(); ++y) {
      for (int x = 0; x < map.nx(); ++x) {
        const VoxelIndex v{x, y, z};
        const Vec3 c = map.center_of(v);
        const double r = map.resolution();
        const AABB voxel{{c.x - r / 2, c.y - r / 2, c.z - r / 2},
                         {c.x + r / 2, c.y + r / 2, c.z + r / 2}};
        bool occ = false;
        for (const AABB& b : world.obstacles) {
          if (voxel.overlaps(b)) {
            occ = true;
            break;
          }
        }
        map.set_state(v, occ ? CellState::Occupied : CellState::Free);
      }
    }
  }
}

inline void fill_state(OccupancyMap& map, CellState s) {
  for (int z = 0; z < map.nz(); ++z)
    for (int y = 0; y < map.ny(); ++y)
      for (int x = 0; x < map.nx(); ++x) map.set_state({x, y, z}, s);
}

inline std::string scenario_dir() {
#ifdef NBV_SCENARIO_DIR
  return NBV_SCENARIO_DIR;
#else
  return "scenarios";
#endif
}

inline std::string test_data_dir() {
#ifdef NBV_TEST_DATA_DIR
  return NBV_TEST_DATA_DIR;
#else
  return "tests/data";
#endif
}

}  // namespace nbv::test
