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

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "nbv/grid_map.hpp"

namespace nbv {

/// Per-cell visibility over a Grid2D plus tallies of what was seen.
/// `cell_reads` counts the occupancy lookups performed by the sweep itself
/// (the per-octant single-visit claim is asserted against it in tests).
struct VisibleSet {
  int width{0};
  int height{0};
  int src_x{0};
  int src_y{0};
  std::vector<std::uint8_t> visible;
  std::int64_t visible_unknown{0};
  std::int64_t visible_free{0};
  std::int64_t cell_reads{0};

  bool is_visible(int x, int y) const {
    return visible[static_cast<size_t>(y) * width + x] != 0;
  }
};

/// Restriction of the FOV computation to a convex cell region, stored as
/// inclusive valid intervals per grid row and per grid column (lo > hi means
/// empty). Cells outside the region are neither read nor marked and never
/// occlude; because the region is convex this equals running the unmasked
/// sweep and discarding out-of-region cells.
struct ConvexMask {
  std::vector<std::array<int, 2>> x_by_row;  // size = grid height
  std::vector<std::array<int, 2>> y_by_col;  // size = grid width
};

/// Recursive shadowcasting over the eight octants centred on the grid's FOV
/// source. Occupied cells block; Unknown cells are transparent. A cell grazed
/// by a sector boundary ray counts as visible. Slope bookkeeping is exact
/// (integer rationals), so results are bit-stable and symmetric under grid
/// rotations/reflections. Throws std::invalid_argument when the source is
/// outside the grid or Occupied.
VisibleSet rsc_visible(const Grid2D& grid);
VisibleSet rsc_visible(const Grid2D& grid, const ConvexMask* mask);

/// Allocation-free variant for hot loops: reuses `out`'s buffers.
void rsc_visible_into(const Grid2D& grid, const ConvexMask* mask, VisibleSet& out);

/// Fixed-ray baseline: n_rays uniformly spaced directions walked cell by cell
/// from the source; each walk stops at an Occupied cell or after range_cells.
VisibleSet raycast_visible(const Grid2D& grid, int n_rays, double range_cells);

/// Allocation-free variant with precomputed unit directions (hot loops reuse
/// both the direction table and `out`'s buffers).
void raycast_visible_into(const Grid2D& grid,
                          std::span<const std::array<double, 2>> dirs,
                          double range_cells, VisibleSet& out);

/// Ray count at which adjacent rays are at most one cell apart at the grid
/// border (the fairness floor for the raycasting baseline).
int default_ray_count(const Grid2D& grid);

/// Brute-force reference: a cell is visible iff the center-to-center segment
/// from the source crosses no Occupied cell interior (corner grazing does not
/// block; an Occupied target is visible when its boundary is reached).
VisibleSet los_oracle(const Grid2D& grid);

/// ASCII rendering used by golden-file tests: source 'S', occupied 'X',
/// visible '.', invisible '#'. Rows are printed top-down (highest y first).
std::string ascii_dump(const Grid2D& grid, const VisibleSet& vis);

}  // namespace nbv
