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

#include "nbv/gain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <array>
#include <vector>

#include "nbv/fov.hpp"

namespace nbv {

std::vector<Vec3> fov_sources(const Vec3& n_prev, const Vec3& n_k, double l_max) {
  if (!(l_max > 0.0)) throw std::invalid_argument("l_max must be positive");
  const Vec3 d = n_k - n_prev;
  const double len = d.norm();
  std::vector<Vec3> sources;
  if (len <= l_max) {
    sources.push_back(n_prev + d * 0.5);
    return sources;
  }
  const int m = static_cast<int>(std::ceil(len / l_max));
  sources.reserve(m);
  for (int i = 0; i < m; ++i) {
    sources.push_back(n_prev + d * ((i + 0.5) / m));
  }
  return sources;
}

double node_gain(double i_prev, double edge_gain_m3, double dist, double lambda) {
  return i_prev + edge_gain_m3 * std::exp(-lambda * dist);
}

namespace {

// Half-plane pair c_lo <= n.p <= c_hi used to rasterize the oriented cuboid
// cross-section.
struct Band {
  double nx, ny, c_lo, c_hi;
};

// Builds the convex mask over the slice grid: row x-intervals from the two
// half-plane bands analytically, column y-intervals derived from the rows so
// both views always describe the same cell set.
ConvexMask rect_mask(const OccupancyMap& map, const Grid2D& g, const Band& a,
                     const Band& b) {
  const double r = map.resolution();
  ConvexMask mask;
  mask.x_by_row.assign(g.height, {1, 0});
  mask.y_by_col.assign(g.width, {1, 0});
  for (int y = 0; y < g.height; ++y) {
    const double cy = map.bounds().lo.y + (g.grid_y0 + y + 0.5) * r;
    double lo_m = -std::numeric_limits<double>::infinity();
    double hi_m = std::numeric_limits<double>::infinity();
    bool empty = false;
    for (const Band* band : {&a, &b}) {
      const double rest = band->ny * cy;
      if (band->nx == 0.0) {
        if (rest < band->c_lo - 1e-9 || rest > band->c_hi + 1e-9) empty = true;
        continue;
      }
      double x0 = (band->c_lo - rest) / band->nx;
      double x1 = (band->c_hi - rest) / band->nx;
      if (x0 > x1) std::swap(x0, x1);
      lo_m = std::max(lo_m, x0);
      hi_m = std::min(hi_m, x1);
    }
    if (empty || lo_m > hi_m) continue;
    const double base = map.bounds().lo.x + (g.grid_x0 + 0.5) * r;
    const int lo = std::max(0, static_cast<int>(std::ceil((lo_m - base) / r - 1e-7)));
    const int hi = std::min(g.width - 1,
                            static_cast<int>(std::floor((hi_m - base) / r + 1e-7)));
    if (lo > hi) continue;
    mask.x_by_row[y] = {lo, hi};
    for (int x = lo; x <= hi; ++x) {
      auto& col = mask.y_by_col[x];
      if (col[0] > col[1]) col = {y, y};
      else col[1] = y;
    }
  }
  return mask;
}

}  // namespace

namespace {

// Shared cuboid evaluation: visible-unknown union over all horizontal slices
// of an oriented box (axes u/v, half extents half_len/half_wid, vertical half
// extent v_half) from the given FOV sources.
double cuboid_unknown_volume(const OccupancyMap& map, const Vec3& center, double ux,
                             double uy, double half_len, double half_wid,
                             double v_half, const std::vector<Vec3>& sources) {
  const double vx = -uy, vy = ux;
  const double half_w_aabb = half_len * std::abs(ux) + half_wid * std::abs(vx);
  const double half_l_aabb = half_len * std::abs(uy) + half_wid * std::abs(vy);
  const Band along{ux, uy, ux * center.x + uy * center.y - half_len,
                   ux * center.x + uy * center.y + half_len};
  const Band across{vx, vy, vx * center.x + vy * center.y - half_wid,
                    vx * center.x + vy * center.y + half_wid};

  const double r = map.resolution();
  const double z_lo = std::max(map.bounds().lo.z, center.z - v_half);
  const double z_hi = std::min(map.bounds().hi.z, center.z + v_half);
  const int iz_lo = std::max(0, static_cast<int>(std::ceil((z_lo - map.bounds().lo.z) / r - 0.5 - 1e-7)));
  const int iz_hi = std::min(map.nz() - 1,
                             static_cast<int>(std::floor((z_hi - map.bounds().lo.z) / r - 0.5 + 1e-7)));

  // Slice geometry and cross-section mask are identical for every layer;
  // build them once and copy only the masked cells per slice.
  auto axis_range = [&](double lo_m, double hi_m, double blo, int n, int& lo, int& hi) {
    lo = std::max(0, static_cast<int>(std::ceil((lo_m - blo) / r - 0.5 - 1e-7)));
    hi = std::min(n - 1, static_cast<int>(std::floor((hi_m - blo) / r - 0.5 + 1e-7)));
  };
  int x_lo, x_hi, y_lo, y_hi;
  axis_range(center.x - half_w_aabb, center.x + half_w_aabb, map.bounds().lo.x,
             map.nx(), x_lo, x_hi);
  axis_range(center.y - half_l_aabb, center.y + half_l_aabb, map.bounds().lo.y,
             map.ny(), y_lo, y_hi);
  if (x_lo > x_hi || y_lo > y_hi) return 0.0;

  Grid2D grid;
  grid.width = x_hi - x_lo + 1;
  grid.height = y_hi - y_lo + 1;
  grid.grid_x0 = x_lo;
  grid.grid_y0 = y_lo;
  const ConvexMask mask = rect_mask(map, grid, along, across);

  // Cells outside the mask rows are never read by the masked sweep, so the
  // slice buffer is only refreshed inside the cross-section.
  const size_t slice_cells = static_cast<size_t>(grid.width) * grid.height;
  grid.cells.assign(slice_cells, CellState::Unknown);

  // Per-edge dedup bitmap over the cuboid's voxel span (sources and slices
  // may see the same voxel more than once); allocated on first use.
  std::vector<std::uint8_t> seen;
  std::int64_t unknown_count = 0;

  VisibleSet vis;
  for (int iz = iz_lo; iz <= iz_hi; ++iz) {
    const double zc = map.bounds().lo.z + (iz + 0.5) * r;
    grid.z_index = iz;
    bool any_unknown = false;
    for (int y = 0; y < grid.height; ++y) {
      const auto& iv = mask.x_by_row[y];
      const std::int64_t row = map.linear_index({x_lo, y_lo + y, iz});
      for (int x = iv[0]; x <= iv[1]; ++x) {
        const CellState s = map.state_by_index(row + x);
        grid.cells[static_cast<size_t>(y) * grid.width + x] = s;
        any_unknown |= s == CellState::Unknown;
      }
    }
    if (!any_unknown) continue;  // nothing this slice could contribute

    if (seen.empty()) seen.assign(slice_cells * (iz_hi - iz_lo + 1), 0);
    std::uint8_t* seen_row = seen.data() + slice_cells * (iz - iz_lo);
    for (const Vec3& src : sources) {
      const auto sv = map.voxel_of({src.x, src.y, zc});
      if (!sv) continue;
      grid.src_x = sv->x - grid.grid_x0;
      grid.src_y = sv->y - grid.grid_y0;
      if (!grid.in_bounds(grid.src_x, grid.src_y)) continue;
      if (grid.at(grid.src_x, grid.src_y) == CellState::Occupied) continue;

      rsc_visible_into(grid, &mask, vis);
      for (int y = 0; y < grid.height; ++y) {
        const auto& iv = mask.x_by_row[y];
        const size_t base = static_cast<size_t>(y) * grid.width;
        for (int x = iv[0]; x <= iv[1]; ++x) {
          if (!vis.visible[base + x]) continue;
          if (grid.cells[base + x] != CellState::Unknown) continue;
          if (seen_row[base + x]) continue;
          seen_row[base + x] = 1;
          ++unknown_count;
        }
      }
    }
  }
  return static_cast<double>(unknown_count) * r * r * r;
}

}  // namespace

EdgeGain edge_gain(const OccupancyMap& map, const Vec3& n_prev, const Vec3& n_k,
                   const EdgeGainParams& params, int edge_id) {
  if (!map.bounds().contains(n_prev) || !map.bounds().contains(n_k)) {
    throw std::invalid_argument("edge_gain: endpoint outside map bounds");
  }

  const Vec3 d = n_k - n_prev;
  const Vec3 c_k = n_prev + d * 0.5;
  const double l_c = d.norm();
  const double half_len = std::max(l_c / 2.0, map.resolution() / 2.0);

  // Cuboid axes: u along the horizontal projection of the edge, v lateral.
  double ux = d.x, uy = d.y;
  const double h_norm = std::hypot(ux, uy);
  if (h_norm > 1e-12) {
    ux /= h_norm;
    uy /= h_norm;
  } else {
    ux = 1.0;
    uy = 0.0;
  }

  const auto sources = fov_sources(n_prev, n_k, params.l_max);
  EdgeGain result;
  result.edge_id = edge_id;
  result.fov_source_count = static_cast<int>(sources.size());
  result.gain_m3 = cuboid_unknown_volume(map, c_k, ux, uy, half_len, params.i_range,
                                         params.i_range, sources);
  return result;
}

double node_rsc_gain(const OccupancyMap& map, const Vec3& node, double i_range) {
  if (!map.bounds().contains(node)) return 0.0;
  return cuboid_unknown_volume(map, node, 1.0, 0.0, i_range, i_range, i_range,
                               {node});
}

double node_raycast_gain(const OccupancyMap& map, const Vec3& node, double d_max,
                         int n_rays) {
  if (!map.bounds().contains(node)) {
    throw std::invalid_argument("node_raycast_gain: node outside map bounds");
  }
  const double r = map.resolution();
  const double z_lo = std::max(map.bounds().lo.z, node.z - d_max);
  const double z_hi = std::min(map.bounds().hi.z, node.z + d_max);
  const int iz_lo = std::max(0, static_cast<int>(std::ceil((z_lo - map.bounds().lo.z) / r - 0.5 - 1e-7)));
  const int iz_hi = std::min(map.nz() - 1,
                             static_cast<int>(std::floor((z_hi - map.bounds().lo.z) / r - 0.5 + 1e-7)));

  std::vector<std::array<double, 2>> dirs(n_rays);
  for (int i = 0; i < n_rays; ++i) {
    const double theta = 2.0 * M_PI * i / n_rays;
    dirs[i] = {std::cos(theta), std::sin(theta)};
  }

  std::int64_t unknown = 0;
  VisibleSet vis;
  for (int iz = iz_lo; iz <= iz_hi; ++iz) {
    const double zc = map.bounds().lo.z + (iz + 0.5) * r;
    Grid2D grid = map.slice({node.x, node.y, zc}, d_max, d_max, zc);
    if (grid.width == 0 || grid.height == 0) continue;
    if (!grid.in_bounds(grid.src_x, grid.src_y)) continue;
    raycast_visible_into(grid, dirs, d_max / r, vis);
    unknown += vis.visible_unknown;
  }
  return static_cast<double>(unknown) * r * r * r;
}

}  // namespace nbv
