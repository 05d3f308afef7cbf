/*
 * Copyright 2026 the nbvrsc authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "nbv/fov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace nbv {

namespace {

// Slopes are col/row ratios with small integer terms (cell corners are at
// half-integer offsets, kept doubled). den is always positive.
struct Slope {
  std::int64_t num;
  std::int64_t den;
};

bool slope_lt(const Slope& a, const Slope& b) { return a.num * b.den < b.num * a.den; }

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  // b > 0
  return a >= 0 ? a / b : -((-a + b - 1) / b);
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) {
  return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

// Low corner ray of cell (row, col): slope (2c-1)/(2r+1). The high corner is
// (2c+1)/(2r-1). A sector touches the cell iff high >= sector.lo and
// low <= sector.hi (inclusive: grazing keeps the cell visible).
Slope low_corner(int row, int col) { return {2LL * col - 1, 2LL * row + 1}; }
Slope high_corner(int row, int col) { return {2LL * col + 1, 2LL * row - 1}; }

// Octant transforms: local (row, col) maps to the grid offset
// (col*xx + row*xy, col*yx + row*yy) from the source.
constexpr int kXX[8] = {1, 0, 0, -1, -1, 0, 0, 1};
constexpr int kXY[8] = {0, 1, -1, 0, 0, -1, 1, 0};
constexpr int kYX[8] = {0, 1, 1, 0, 0, -1, -1, 0};
constexpr int kYY[8] = {1, 0, 0, 1, -1, 0, 0, -1};

// Sector bound with inclusivity: an inclusive bound keeps cells its ray
// merely grazes visible; an exclusive bound arises where the boundary ray
// squeezes through a corner shared by two diagonally-adjacent occupied cells
// (a sealed pinch, which physically admits no sight line).
struct Bound {
  Slope s;
  bool inclusive;
};

struct OctantScan {
  const Grid2D& grid;
  const ConvexMask* mask;
  VisibleSet& out;
  int xx, xy, yx, yy;
  int row_max;       // last local row inside the grid
  int col_grid_max;  // last local col inside the grid (row-independent)

  void mark(int gx, int gy) {
    out.visible[static_cast<size_t>(gy) * grid.width + gx] = 1;
  }

  // Occupancy of the local cell (r, c), honoring grid and mask borders
  // (cells outside either are transparent).
  bool occupied_local(int r, int c) {
    if (r < 0 || r > row_max || c < 0 || c > col_grid_max) return false;
    if (mask) {
      int v_lo, v_hi;
      valid_cols(r, v_lo, v_hi);
      if (c < v_lo || c > v_hi) return false;
    }
    const int gx = grid.src_x + c * xx + r * xy;
    const int gy = grid.src_y + c * yx + r * yy;
    ++out.cell_reads;
    return grid.at(gx, gy) == CellState::Occupied;
  }

  // Valid local col interval for local row r, combining the grid border and
  // the convex mask. lo > hi means the row has no readable cells.
  void valid_cols(int r, int& lo, int& hi) const {
    lo = 0;
    hi = col_grid_max;
    if (!mask) return;
    int mlo, mhi;
    if (xx != 0) {  // col axis is x, row axis is y
      const int gy = grid.src_y + r * yy;
      mlo = mask->x_by_row[gy][0];
      mhi = mask->x_by_row[gy][1];
      if (xx > 0) {
        lo = std::max(lo, mlo - grid.src_x);
        hi = std::min(hi, mhi - grid.src_x);
      } else {
        lo = std::max(lo, grid.src_x - mhi);
        hi = std::min(hi, grid.src_x - mlo);
      }
    } else {
      const int gx = grid.src_x + r * xy;
      mlo = mask->y_by_col[gx][0];
      mhi = mask->y_by_col[gx][1];
      if (yx > 0) {
        lo = std::max(lo, mlo - grid.src_y);
        hi = std::min(hi, mhi - grid.src_y);
      } else {
        lo = std::max(lo, grid.src_y - mhi);
        hi = std::min(hi, grid.src_y - mlo);
      }
    }
  }

  static bool dead(const Bound& lo, const Bound& hi) {
    if (slope_lt(hi.s, lo.s)) return true;
    if (!slope_lt(lo.s, hi.s)) return !(lo.inclusive && hi.inclusive);
    return false;
  }

  // Child sector top at the occupied cell's low corner; the bound is
  // exclusive when the corner is a sealed pinch (the cell diagonally across
  // the corner, local (r+1, c-1), is also occupied).
  Bound clip_hi(const Bound& hi, int r, int c) {
    const Slope corner = low_corner(r, c);
    if (slope_lt(hi.s, corner)) return hi;
    const bool inc = !occupied_local(r + 1, c - 1);
    if (slope_lt(corner, hi.s)) return {corner, inc};
    return {corner, hi.inclusive && inc};
  }

  // Continuing sector bottom at the run's last occupied cell's high corner;
  // exclusive when the cell diagonally across that corner, local (r-1, c+1),
  // is also occupied.
  Bound clip_lo(const Bound& lo, int r, int c_last) {
    const Slope corner = high_corner(r, c_last);
    if (slope_lt(corner, lo.s)) return lo;
    const bool inc = !occupied_local(r - 1, c_last + 1);
    if (slope_lt(lo.s, corner)) return {corner, inc};
    return {corner, lo.inclusive && inc};
  }

  void scan(int row_start, Bound lo, Bound hi) {
    for (int r = row_start; r <= row_max; ++r) {
      if (dead(lo, hi)) return;
      // First col whose high corner reaches lo, last col whose low corner
      // stays under hi; grazing counts only for inclusive bounds.
      std::int64_t c_min = ceil_div(lo.s.num * (2 * r - 1) - lo.s.den, 2 * lo.s.den);
      if (!lo.inclusive &&
          c_min * 2 * lo.s.den == lo.s.num * (2 * r - 1) - lo.s.den) {
        ++c_min;  // high corner exactly on the exclusive bound
      }
      if (c_min < 0) c_min = 0;
      std::int64_t c_slope_max = floor_div(hi.s.num * (2 * r + 1) + hi.s.den, 2 * hi.s.den);
      if (!hi.inclusive &&
          c_slope_max * 2 * hi.s.den == hi.s.num * (2 * r + 1) + hi.s.den) {
        --c_slope_max;  // low corner exactly on the exclusive bound
      }
      if (c_slope_max > r) c_slope_max = r;
      if (c_min > col_grid_max) return;  // sector left the grid; widens with r

      int v_lo, v_hi;
      valid_cols(r, v_lo, v_hi);
      const std::int64_t c_lo = std::max<std::int64_t>(c_min, v_lo);
      const std::int64_t c_hi = std::min<std::int64_t>(c_slope_max, v_hi);

      bool blocked = false;
      for (std::int64_t c = c_lo; c <= c_hi; ++c) {
        const int gx = grid.src_x + static_cast<int>(c) * xx + r * xy;
        const int gy = grid.src_y + static_cast<int>(c) * yx + r * yy;
        ++out.cell_reads;
        const bool occ = grid.at(gx, gy) == CellState::Occupied;
        mark(gx, gy);
        if (occ) {
          if (!blocked) {
            blocked = true;
            const Bound child_hi = clip_hi(hi, r, static_cast<int>(c));
            if (!dead(lo, child_hi)) scan(r + 1, lo, child_hi);
          }
        } else if (blocked) {
          blocked = false;
          lo = clip_lo(lo, r, static_cast<int>(c) - 1);
          if (dead(lo, hi)) return;
        }
      }
      if (blocked) {
        if (c_hi >= c_slope_max) return;  // run shadows everything up to hi
        // Run ended at a grid/mask border; cells beyond are transparent.
        lo = clip_lo(lo, r, static_cast<int>(c_hi));
      }
    }
  }
};

void run_rsc(const Grid2D& grid, const ConvexMask* mask, VisibleSet& vis) {
  if (!grid.in_bounds(grid.src_x, grid.src_y)) {
    throw std::invalid_argument("rsc_visible: source outside grid");
  }
  if (grid.at(grid.src_x, grid.src_y) == CellState::Occupied) {
    throw std::invalid_argument("rsc_visible: source cell is Occupied");
  }
  vis.width = grid.width;
  vis.height = grid.height;
  vis.src_x = grid.src_x;
  vis.src_y = grid.src_y;
  vis.visible.assign(static_cast<size_t>(grid.width) * grid.height, 0);
  vis.visible_unknown = 0;
  vis.visible_free = 0;
  vis.cell_reads = 0;
  vis.visible[static_cast<size_t>(grid.src_y) * grid.width + grid.src_x] = 1;

  for (int o = 0; o < 8; ++o) {
    OctantScan octant{grid, mask, vis, kXX[o], kXY[o], kYX[o], kYY[o], 0, 0};
    const int row_axis_max = kXY[o] != 0
                                 ? (kXY[o] > 0 ? grid.width - 1 - grid.src_x : grid.src_x)
                                 : (kYY[o] > 0 ? grid.height - 1 - grid.src_y : grid.src_y);
    const int col_axis_max = kXX[o] != 0
                                 ? (kXX[o] > 0 ? grid.width - 1 - grid.src_x : grid.src_x)
                                 : (kYX[o] > 0 ? grid.height - 1 - grid.src_y : grid.src_y);
    octant.row_max = row_axis_max;
    octant.col_grid_max = col_axis_max;
    octant.scan(1, Bound{{0, 1}, true}, Bound{{1, 1}, true});
  }

  for (int y = 0; y < grid.height; ++y) {
    int x_lo = 0, x_hi = grid.width - 1;
    if (mask) {
      x_lo = mask->x_by_row[y][0];
      x_hi = mask->x_by_row[y][1];
    }
    for (int x = x_lo; x <= x_hi; ++x) {
      if (!vis.is_visible(x, y)) continue;
      const CellState s = grid.at(x, y);
      if (s == CellState::Unknown) ++vis.visible_unknown;
      else if (s == CellState::Free) ++vis.visible_free;
    }
  }
}

}  // namespace

VisibleSet rsc_visible(const Grid2D& grid) {
  VisibleSet vis;
  run_rsc(grid, nullptr, vis);
  return vis;
}

VisibleSet rsc_visible(const Grid2D& grid, const ConvexMask* mask) {
  VisibleSet vis;
  run_rsc(grid, mask, vis);
  return vis;
}

void rsc_visible_into(const Grid2D& grid, const ConvexMask* mask, VisibleSet& out) {
  run_rsc(grid, mask, out);
}

VisibleSet raycast_visible(const Grid2D& grid, int n_rays, double range_cells) {
  std::vector<std::array<double, 2>> dirs(n_rays);
  for (int i = 0; i < n_rays; ++i) {
    const double theta = 2.0 * M_PI * i / n_rays;
    dirs[i] = {std::cos(theta), std::sin(theta)};
  }
  VisibleSet vis;
  raycast_visible_into(grid, dirs, range_cells, vis);
  return vis;
}

void raycast_visible_into(const Grid2D& grid,
                          std::span<const std::array<double, 2>> dirs,
                          double range_cells, VisibleSet& vis) {
  if (!grid.in_bounds(grid.src_x, grid.src_y)) {
    throw std::invalid_argument("raycast_visible: source outside grid");
  }
  vis.width = grid.width;
  vis.height = grid.height;
  vis.src_x = grid.src_x;
  vis.src_y = grid.src_y;
  vis.visible.assign(static_cast<size_t>(grid.width) * grid.height, 0);
  vis.visible_unknown = 0;
  vis.visible_free = 0;
  vis.cell_reads = 0;
  vis.visible[static_cast<size_t>(grid.src_y) * grid.width + grid.src_x] = 1;

  for (const auto& dir : dirs) {
    const double dx = dir[0];
    const double dy = dir[1];
    int cx = grid.src_x;
    int cy = grid.src_y;
    const int sx = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
    const int sy = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
    // Distance along the ray to the next cell boundary, in cell units,
    // starting from the cell center.
    double t_max_x = sx != 0 ? 0.5 / std::abs(dx) : std::numeric_limits<double>::infinity();
    double t_max_y = sy != 0 ? 0.5 / std::abs(dy) : std::numeric_limits<double>::infinity();
    const double t_dx = sx != 0 ? 1.0 / std::abs(dx) : 0.0;
    const double t_dy = sy != 0 ? 1.0 / std::abs(dy) : 0.0;
    while (true) {
      double t;
      // Exact ties (diagonal rays through cell corners) step both axes; a
      // corner sealed by two diagonally-adjacent occupied cells stops the ray.
      if (std::abs(t_max_x - t_max_y) < 1e-12) {
        if (grid.in_bounds(cx + sx, cy) && grid.in_bounds(cx, cy + sy) &&
            grid.at(cx + sx, cy) == CellState::Occupied &&
            grid.at(cx, cy + sy) == CellState::Occupied) {
          break;
        }
        t = t_max_x;
        cx += sx;
        cy += sy;
        t_max_x += t_dx;
        t_max_y += t_dy;
      } else if (t_max_x < t_max_y) {
        t = t_max_x;
        cx += sx;
        t_max_x += t_dx;
      } else {
        t = t_max_y;
        cy += sy;
        t_max_y += t_dy;
      }
      if (t > range_cells || !grid.in_bounds(cx, cy)) break;
      ++vis.cell_reads;
      vis.visible[static_cast<size_t>(cy) * grid.width + cx] = 1;
      if (grid.at(cx, cy) == CellState::Occupied) break;
    }
  }

  for (int y = 0; y < grid.height; ++y) {
    for (int x = 0; x < grid.width; ++x) {
      if (!vis.is_visible(x, y)) continue;
      const CellState s = grid.at(x, y);
      if (s == CellState::Unknown) ++vis.visible_unknown;
      else if (s == CellState::Free) ++vis.visible_free;
    }
  }
}

int default_ray_count(const Grid2D& grid) {
  double d = 0.0;
  const double corners[4][2] = {
      {0.0, 0.0},
      {static_cast<double>(grid.width - 1), 0.0},
      {0.0, static_cast<double>(grid.height - 1)},
      {static_cast<double>(grid.width - 1), static_cast<double>(grid.height - 1)}};
  for (const auto& c : corners) {
    const double ddx = c[0] - grid.src_x;
    const double ddy = c[1] - grid.src_y;
    d = std::max(d, std::hypot(ddx, ddy));
  }
  return std::max(8, static_cast<int>(std::ceil(2.0 * M_PI * d)));
}

namespace {

// Exact center-to-center walk in doubled coordinates: cell centers are even,
// boundaries odd. A step through a lattice corner moves diagonally and leaves
// the two grazed side cells untouched.
bool los_clear(const Grid2D& grid, int sx, int sy, int tx, int ty) {
  int cx = sx, cy = sy;
  const std::int64_t dx2 = 2LL * (tx - sx);
  const std::int64_t dy2 = 2LL * (ty - sy);
  const int step_x = dx2 > 0 ? 1 : (dx2 < 0 ? -1 : 0);
  const int step_y = dy2 > 0 ? 1 : (dy2 < 0 ? -1 : 0);
  const std::int64_t adx = std::abs(dx2);
  const std::int64_t ady = std::abs(dy2);
  while (cx != tx || cy != ty) {
    bool move_x, move_y;
    if (step_x == 0) {
      move_x = false;
      move_y = true;
    } else if (step_y == 0) {
      move_x = true;
      move_y = false;
    } else {
      // Compare distances (in t) to the next odd boundary on each axis.
      const std::int64_t bx = std::abs(2LL * cx + step_x - 2LL * sx);  // |X - x0|
      const std::int64_t by = std::abs(2LL * cy + step_y - 2LL * sy);
      const std::int64_t lhs = bx * ady;
      const std::int64_t rhs = by * adx;
      move_x = lhs <= rhs;
      move_y = rhs <= lhs;
    }
    if (move_x && move_y) {
      // Exact corner crossing: two diagonally-adjacent occupied cells seal
      // the corner; grazing a single occupied corner does not block.
      if (grid.at(cx + step_x, cy) == CellState::Occupied &&
          grid.at(cx, cy + step_y) == CellState::Occupied) {
        return false;
      }
    }
    if (move_x) cx += step_x;
    if (move_y) cy += step_y;
    if (cx == tx && cy == ty) return true;
    if (grid.at(cx, cy) == CellState::Occupied) return false;
  }
  return true;
}

}  // namespace

VisibleSet los_oracle(const Grid2D& grid) {
  if (!grid.in_bounds(grid.src_x, grid.src_y)) {
    throw std::invalid_argument("los_oracle: source outside grid");
  }
  VisibleSet vis;
  vis.width = grid.width;
  vis.height = grid.height;
  vis.src_x = grid.src_x;
  vis.src_y = grid.src_y;
  vis.visible.assign(static_cast<size_t>(grid.width) * grid.height, 0);
  for (int y = 0; y < grid.height; ++y) {
    for (int x = 0; x < grid.width; ++x) {
      if (los_clear(grid, grid.src_x, grid.src_y, x, y)) {
        vis.visible[static_cast<size_t>(y) * grid.width + x] = 1;
        const CellState s = grid.at(x, y);
        if (s == CellState::Unknown) ++vis.visible_unknown;
        else if (s == CellState::Free) ++vis.visible_free;
      }
    }
  }
  return vis;
}

std::string ascii_dump(const Grid2D& grid, const VisibleSet& vis) {
  std::ostringstream out;
  for (int y = grid.height - 1; y >= 0; --y) {
    for (int x = 0; x < grid.width; ++x) {
      char c;
      if (x == grid.src_x && y == grid.src_y) c = 'S';
      else if (grid.at(x, y) == CellState::Occupied) c = 'X';
      else c = vis.is_visible(x, y) ? '.' : '#';
      out << c;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace nbv
