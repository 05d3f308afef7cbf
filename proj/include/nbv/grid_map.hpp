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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nbv/geometry.hpp"

namespace nbv {

enum class CellState : std::uint8_t { Free = 0, Occupied = 1, Unknown = 2 };

struct VoxelIndex {
  int x{0};
  int y{0};
  int z{0};
  bool operator==(const VoxelIndex&) const = default;
};

/// 2D slice of the map used as the FOV grid. Cells are row-major
/// (y * width + x); (grid_x0, grid_y0, z_index) locate cell (0,0) in the
/// parent map so visible cells can be mapped back to voxels.
struct Grid2D {
  int width{0};
  int height{0};
  int src_x{0};  ///< FOV source cell
  int src_y{0};
  int grid_x0{0};
  int grid_y0{0};
  int z_index{0};
  std::vector<CellState> cells;

  CellState at(int x, int y) const { return cells[static_cast<size_t>(y) * width + x]; }
  void set(int x, int y, CellState s) { cells[static_cast<size_t>(y) * width + x] = s; }
  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
};

/// Uniform-resolution 3D occupancy map. Every cell starts Unknown; scan
/// integration marks traversed voxels Free and hit voxels Occupied. Within a
/// single scan Occupied wins over Free on conflict; across scans the latest
/// scan wins, and a known cell never reverts to Unknown.
///
/// Thread contract: many concurrent readers or one exclusive writer; no
/// internal locking.
class OccupancyMap {
 public:
  /// Builds an all-Unknown map covering `bounds` at `resolution` meters per
  /// voxel. Cell counts are ceil(extent / resolution) per axis. Throws
  /// std::invalid_argument for non-positive resolution or bounds smaller than
  /// one voxel in any axis.
  OccupancyMap(const AABB& bounds, double resolution);

  const AABB& bounds() const { return bounds_; }
  double resolution() const { return resolution_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  std::int64_t cell_count() const { return static_cast<std::int64_t>(nx_) * ny_ * nz_; }

  bool in_grid(const VoxelIndex& v) const {
    return v.x >= 0 && v.x < nx_ && v.y >= 0 && v.y < ny_ && v.z >= 0 && v.z < nz_;
  }
  std::int64_t linear_index(const VoxelIndex& v) const {
    return (static_cast<std::int64_t>(v.z) * ny_ + v.y) * nx_ + v.x;
  }
  CellState state(const VoxelIndex& v) const { return cells_[linear_index(v)]; }
  CellState state_by_index(std::int64_t i) const { return cells_[i]; }
  void set_state(const VoxelIndex& v, CellState s) { cells_[linear_index(v)] = s; }

  /// State of the voxel containing p, or nullopt when p is out of bounds.
  std::optional<CellState> state_at(const Vec3& p) const;

  std::optional<VoxelIndex> voxel_of(const Vec3& p) const;
  Vec3 center_of(const VoxelIndex& v) const;

  /// Integrates one scan taken from `origin` (must be inside bounds).
  /// Hit rays free every traversed voxel and mark the voxel containing the
  /// hit point Occupied; miss rays free voxels out to max_range. Voxels
  /// outside the map are ignored. The voxel containing `origin` is never
  /// marked Occupied.
  void integrate_scan(const Vec3& origin, std::span<const Vec3> hits,
                      std::span<const Vec3> miss_dirs, double max_range);

  /// Extracts the horizontal slice at height z containing every voxel whose
  /// center falls in the axis-aligned rectangle center +- (half_w, half_l),
  /// clipped to the map. The slice's FOV source is the voxel containing
  /// `center`. Throws std::invalid_argument when z is out of bounds.
  Grid2D slice(const Vec3& center, double half_w, double half_l, double z) const;

  /// True iff every voxel overlapping the l x w x h prism centered at p is
  /// Free. Unknown counts as not free; voxels outside the map count as not
  /// free. Prism faces exactly on voxel boundaries do not pull in the
  /// neighbouring voxel.
  bool prism_free(const Vec3& p, const Vec3& prism_dims) const;

  /// Swept prism check along [a,b], sampled at <= resolution/2 spacing
  /// (conservative approximation of the exact swept volume).
  bool segment_free(const Vec3& a, const Vec3& b, const Vec3& prism_dims) const;

  /// (count of Unknown voxels with centers in region) * r^3.
  double unknown_volume(const AABB& region) const;
  double unknown_volume() const { return unknown_volume(bounds_); }

  /// Plain-text snapshot: versioned header plus run-length-encoded states.
  /// Stable for identical map contents. See README for the exact format.
  std::string to_snapshot() const;
  static OccupancyMap from_snapshot(const std::string& text);

 private:
  struct IndexRange {
    int lo;
    int hi;  // inclusive; empty when lo > hi
  };
  IndexRange overlap_range(double lo_m, double hi_m, int axis) const;
  IndexRange center_range(double lo_m, double hi_m, int axis) const;

  friend class MapTraversal;

  AABB bounds_;
  double resolution_{0.0};
  int nx_{0}, ny_{0}, nz_{0};
  std::vector<CellState> cells_;
};

}  // namespace nbv
