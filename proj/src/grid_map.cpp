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

#include "nbv/grid_map.hpp"

#include <cassert>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace nbv {

namespace {

// Tolerance, in units of voxel indices, used to snap coordinates that land
// (up to float error) exactly on a voxel boundary.
constexpr double kIndexSnap = 1e-7;

double axis_of(const Vec3& v, int axis) {
  return axis == 0 ? v.x : (axis == 1 ? v.y : v.z);
}

}  // namespace

OccupancyMap::OccupancyMap(const AABB& bounds, double resolution)
    : bounds_(bounds), resolution_(resolution) {
  if (!(resolution > 0.0)) {
    throw std::invalid_argument("map resolution must be positive");
  }
  const Vec3 e = bounds.extent();
  if (e.x < resolution || e.y < resolution || e.z < resolution) {
    throw std::invalid_argument("map bounds smaller than one voxel");
  }
  nx_ = static_cast<int>(std::ceil(e.x / resolution - kIndexSnap));
  ny_ = static_cast<int>(std::ceil(e.y / resolution - kIndexSnap));
  nz_ = static_cast<int>(std::ceil(e.z / resolution - kIndexSnap));
  cells_.assign(static_cast<size_t>(cell_count()), CellState::Unknown);
}

std::optional<VoxelIndex> OccupancyMap::voxel_of(const Vec3& p) const {
  if (!bounds_.contains(p)) return std::nullopt;
  auto idx = [&](double v, double lo, int n) {
    int i = static_cast<int>(std::floor((v - lo) / resolution_));
    return std::clamp(i, 0, n - 1);
  };
  return VoxelIndex{idx(p.x, bounds_.lo.x, nx_), idx(p.y, bounds_.lo.y, ny_),
                    idx(p.z, bounds_.lo.z, nz_)};
}

Vec3 OccupancyMap::center_of(const VoxelIndex& v) const {
  return {bounds_.lo.x + (v.x + 0.5) * resolution_,
          bounds_.lo.y + (v.y + 0.5) * resolution_,
          bounds_.lo.z + (v.z + 0.5) * resolution_};
}

std::optional<CellState> OccupancyMap::state_at(const Vec3& p) const {
  const auto v = voxel_of(p);
  if (!v) return std::nullopt;
  return state(*v);
}

OccupancyMap::IndexRange OccupancyMap::overlap_range(double lo_m, double hi_m,
                                                     int axis) const {
  const double blo = axis_of(bounds_.lo, axis);
  const int n = axis == 0 ? nx_ : (axis == 1 ? ny_ : nz_);
  int lo = static_cast<int>(std::floor((lo_m - blo) / resolution_ + kIndexSnap));
  int hi = static_cast<int>(std::ceil((hi_m - blo) / resolution_ - kIndexSnap)) - 1;
  return {std::max(lo, 0), std::min(hi, n - 1)};
}

OccupancyMap::IndexRange OccupancyMap::center_range(double lo_m, double hi_m,
                                                    int axis) const {
  const double blo = axis_of(bounds_.lo, axis);
  const int n = axis == 0 ? nx_ : (axis == 1 ? ny_ : nz_);
  int lo = static_cast<int>(std::ceil((lo_m - blo) / resolution_ - 0.5 - kIndexSnap));
  int hi = static_cast<int>(std::floor((hi_m - blo) / resolution_ - 0.5 + kIndexSnap));
  return {std::max(lo, 0), std::min(hi, n - 1)};
}

namespace {

// Amanatides-Woo style voxel walk over the segment [p0, p1]. Exact ties on
// cell corners/edges step all tied axes at once, so grazed side voxels are
// skipped. Visits the voxel containing p0 first; stops when the segment ends
// or the walk leaves the grid. visit() returning false aborts the walk.
template <typename Visit>
void walk_segment(const OccupancyMap& map, const Vec3& p0, const Vec3& p1,
                  Visit&& visit) {
  const auto start = map.voxel_of(p0);
  if (!start) return;
  VoxelIndex v = *start;
  if (!visit(v)) return;

  const Vec3 d = p1 - p0;
  const double r = map.resolution();
  int step[3];
  double t_max[3];
  double t_delta[3];
  const double o[3] = {p0.x, p0.y, p0.z};
  const double dd[3] = {d.x, d.y, d.z};
  const double blo[3] = {map.bounds().lo.x, map.bounds().lo.y, map.bounds().lo.z};
  int vi[3] = {v.x, v.y, v.z};
  for (int i = 0; i < 3; ++i) {
    if (dd[i] > 0.0) {
      step[i] = 1;
      t_max[i] = (blo[i] + (vi[i] + 1) * r - o[i]) / dd[i];
      t_delta[i] = r / dd[i];
    } else if (dd[i] < 0.0) {
      step[i] = -1;
      t_max[i] = (blo[i] + vi[i] * r - o[i]) / dd[i];
      t_delta[i] = -r / dd[i];
    } else {
      step[i] = 0;
      t_max[i] = std::numeric_limits<double>::infinity();
      t_delta[i] = std::numeric_limits<double>::infinity();
    }
  }

  const double t_end = 1.0 - 1e-12;
  while (true) {
    const double t = std::min({t_max[0], t_max[1], t_max[2]});
    if (t >= t_end) break;
    for (int i = 0; i < 3; ++i) {
      if (t_max[i] == t) {
        vi[i] += step[i];
        t_max[i] += t_delta[i];
      }
    }
    const VoxelIndex next{vi[0], vi[1], vi[2]};
    if (!map.in_grid(next)) break;
    if (!visit(next)) return;
  }
}

}  // namespace

void OccupancyMap::integrate_scan(const Vec3& origin, std::span<const Vec3> hits,
                                  std::span<const Vec3> miss_dirs,
                                  double max_range) {
  const auto origin_voxel = voxel_of(origin);
  if (!origin_voxel) {
    throw std::invalid_argument("scan origin outside map bounds");
  }

  std::vector<VoxelIndex> occupied;
  occupied.reserve(hits.size());

  for (const Vec3& hit : hits) {
    const Vec3 dir = (hit - origin).normalized();
    // Attribute the endpoint to the voxel just past the surface so boundary
    // hits land on the obstacle side regardless of approach direction.
    const Vec3 inside = hit + dir * (resolution_ * 1e-4);
    const auto hit_voxel = voxel_of(inside);
    if (hit_voxel) occupied.push_back(*hit_voxel);
    walk_segment(*this, origin, hit, [&](const VoxelIndex& v) {
      if (!hit_voxel || !(v == *hit_voxel)) set_state(v, CellState::Free);
      return true;
    });
  }

  for (const Vec3& dir : miss_dirs) {
    const Vec3 end = origin + dir.normalized() * max_range;
    walk_segment(*this, origin, end, [&](const VoxelIndex& v) {
      set_state(v, CellState::Free);
      return true;
    });
  }

  // Occupied latches over Free within the scan; the sensor-origin voxel is
  // physically free and never latched.
  for (const VoxelIndex& v : occupied) {
    if (v == *origin_voxel) continue;
    set_state(v, CellState::Occupied);
  }
}

Grid2D OccupancyMap::slice(const Vec3& center, double half_w, double half_l,
                           double z) const {
  if (z < bounds_.lo.z || z > bounds_.hi.z) {
    throw std::invalid_argument("slice height outside map bounds");
  }
  int iz = static_cast<int>(std::floor((z - bounds_.lo.z) / resolution_));
  iz = std::clamp(iz, 0, nz_ - 1);

  const IndexRange xr = center_range(center.x - half_w, center.x + half_w, 0);
  const IndexRange yr = center_range(center.y - half_l, center.y + half_l, 1);

  Grid2D g;
  g.z_index = iz;
  if (xr.lo > xr.hi || yr.lo > yr.hi) return g;
  g.width = xr.hi - xr.lo + 1;
  g.height = yr.hi - yr.lo + 1;
  g.grid_x0 = xr.lo;
  g.grid_y0 = yr.lo;
  g.cells.resize(static_cast<size_t>(g.width) * g.height);
  for (int y = 0; y < g.height; ++y) {
    for (int x = 0; x < g.width; ++x) {
      g.cells[static_cast<size_t>(y) * g.width + x] =
          state({xr.lo + x, yr.lo + y, iz});
    }
  }
  const auto src = voxel_of(center);
  const int sx = src ? src->x : (xr.lo + xr.hi) / 2;
  const int sy = src ? src->y : (yr.lo + yr.hi) / 2;
  g.src_x = std::clamp(sx, xr.lo, xr.hi) - xr.lo;
  g.src_y = std::clamp(sy, yr.lo, yr.hi) - yr.lo;
  return g;
}

bool OccupancyMap::prism_free(const Vec3& p, const Vec3& prism_dims) const {
  const AABB prism = AABB::from_center(p, prism_dims);
  // Flight volume must stay inside the mapped region.
  const Vec3 grid_hi = {bounds_.lo.x + nx_ * resolution_,
                        bounds_.lo.y + ny_ * resolution_,
                        bounds_.lo.z + nz_ * resolution_};
  const double snap = resolution_ * kIndexSnap;
  if (prism.lo.x < bounds_.lo.x - snap || prism.lo.y < bounds_.lo.y - snap ||
      prism.lo.z < bounds_.lo.z - snap || prism.hi.x > grid_hi.x + snap ||
      prism.hi.y > grid_hi.y + snap || prism.hi.z > grid_hi.z + snap) {
    return false;
  }
  const IndexRange xr = overlap_range(prism.lo.x, prism.hi.x, 0);
  const IndexRange yr = overlap_range(prism.lo.y, prism.hi.y, 1);
  const IndexRange zr = overlap_range(prism.lo.z, prism.hi.z, 2);
  for (int z = zr.lo; z <= zr.hi; ++z) {
    for (int y = yr.lo; y <= yr.hi; ++y) {
      for (int x = xr.lo; x <= xr.hi; ++x) {
        if (state({x, y, z}) != CellState::Free) return false;
      }
    }
  }
  return true;
}

bool OccupancyMap::segment_free(const Vec3& a, const Vec3& b,
                                const Vec3& prism_dims) const {
  const double len = (b - a).norm();
  const int n = std::max(1, static_cast<int>(std::ceil(len / (resolution_ * 0.5))));
  for (int k = 0; k <= n; ++k) {
    const Vec3 p = a + (b - a) * (static_cast<double>(k) / n);
    if (!prism_free(p, prism_dims)) return false;
  }
  return true;
}

double OccupancyMap::unknown_volume(const AABB& region) const {
  const IndexRange xr = center_range(region.lo.x, region.hi.x, 0);
  const IndexRange yr = center_range(region.lo.y, region.hi.y, 1);
  const IndexRange zr = center_range(region.lo.z, region.hi.z, 2);
  std::int64_t count = 0;
  for (int z = zr.lo; z <= zr.hi; ++z) {
    for (int y = yr.lo; y <= yr.hi; ++y) {
      const std::int64_t row = (static_cast<std::int64_t>(z) * ny_ + y) * nx_;
      for (int x = xr.lo; x <= xr.hi; ++x) {
        if (cells_[row + x] == CellState::Unknown) ++count;
      }
    }
  }
  return static_cast<double>(count) * resolution_ * resolution_ * resolution_;
}

namespace {
char state_code(CellState s) {
  switch (s) {
    case CellState::Free: return 'F';
    case CellState::Occupied: return 'O';
    case CellState::Unknown: return 'U';
  }
  return '?';
}
}  // namespace

std::string OccupancyMap::to_snapshot() const {
  std::ostringstream out;
  char buf[192];
  out << "nbvmap 1\n";
  std::snprintf(buf, sizeof buf, "bounds %.17g %.17g %.17g %.17g %.17g %.17g\n",
                bounds_.lo.x, bounds_.lo.y, bounds_.lo.z, bounds_.hi.x,
                bounds_.hi.y, bounds_.hi.z);
  out << buf;
  std::snprintf(buf, sizeof buf, "resolution %.17g\n", resolution_);
  out << buf;
  out << "dims " << nx_ << ' ' << ny_ << ' ' << nz_ << "\ncells";
  std::int64_t i = 0;
  const std::int64_t n = cell_count();
  int line = 5;
  while (i < n) {
    std::int64_t j = i;
    while (j < n && cells_[j] == cells_[i]) ++j;
    const int written = std::snprintf(buf, sizeof buf, " %c%lld", state_code(cells_[i]),
                                      static_cast<long long>(j - i));
    if (line + written > 96) {
      out << "\ncells";
      line = 5;
    }
    out << buf;
    line += written;
    i = j;
  }
  out << "\nend\n";
  return out.str();
}

OccupancyMap OccupancyMap::from_snapshot(const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  auto expect = [&](const char* what) {
    if (!(in >> tok) || tok != what) {
      throw std::runtime_error(std::string("map snapshot: expected ") + what);
    }
  };
  expect("nbvmap");
  int version = 0;
  in >> version;
  if (version != 1) throw std::runtime_error("map snapshot: unsupported version");
  expect("bounds");
  AABB b;
  in >> b.lo.x >> b.lo.y >> b.lo.z >> b.hi.x >> b.hi.y >> b.hi.z;
  expect("resolution");
  double r = 0.0;
  in >> r;
  expect("dims");
  int nx = 0, ny = 0, nz = 0;
  in >> nx >> ny >> nz;
  OccupancyMap map(b, r);
  if (map.nx() != nx || map.ny() != ny || map.nz() != nz) {
    throw std::runtime_error("map snapshot: dims do not match bounds/resolution");
  }
  std::int64_t i = 0;
  const std::int64_t n = map.cell_count();
  while (in >> tok) {
    if (tok == "cells") continue;
    if (tok == "end") break;
    CellState s;
    switch (tok[0]) {
      case 'F': s = CellState::Free; break;
      case 'O': s = CellState::Occupied; break;
      case 'U': s = CellState::Unknown; break;
      default: throw std::runtime_error("map snapshot: bad run token " + tok);
    }
    const long long count = std::strtoll(tok.c_str() + 1, nullptr, 10);
    if (count <= 0 || i + count > n) {
      throw std::runtime_error("map snapshot: run length overflows grid");
    }
    std::fill(map.cells_.begin() + i, map.cells_.begin() + i + count, s);
    i += count;
  }
  if (i != n) throw std::runtime_error("map snapshot: truncated cell data");
  return map;
}

}  // namespace nbv
