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
#include <map>
#include <string>
#include <vector>

#include "nbv/geometry.hpp"

namespace nbv {

/// Robot state: position plus yaw in [-pi, pi).
struct State {
  Vec3 p;
  double yaw{0.0};
};

struct SensorModel {
  double r_max{20.0};        ///< maximum range [m]
  double alpha_h_deg{360.0};  ///< horizontal FOV
  double alpha_v_deg{30.0};   ///< vertical FOV
  int n_h{360};               ///< azimuth ray count
  int n_v{16};                ///< elevation ray count
  double mount_pitch{0.0};    ///< sensor pitch offset [rad]
};

/// One simulated LiDAR revolution. hits lie exactly on obstacle surfaces;
/// miss_dirs are unit direction vectors of rays that reached r_max or left
/// the world without touching an obstacle.
struct Scan {
  Vec3 origin;
  std::vector<Vec3> hits;
  std::vector<Vec3> miss_dirs;
};

/// Ground-truth environment: an axis-aligned bounding volume filled with
/// axis-aligned box obstacles. Immutable after construction; freely shared
/// across threads.
struct World {
  AABB bounds;
  std::vector<AABB> obstacles;
  State start;

  bool point_in_obstacle(const Vec3& p) const;
  /// Ground-truth collision test for an l*w*h prism centered at p: true when
  /// the prism leaves the bounds or open-overlaps any obstacle box.
  bool prism_collides(const Vec3& p, const Vec3& prism_dims) const;
};

/// World plus the Table-style exploration parameters carried by the scenario
/// file (resolution, sensor, speeds, gain parameters, ...). Keys are the flat
/// lowercase names documented in README; values are parsed doubles.
struct LoadedScenario {
  World world;
  std::map<std::string, double> params;
};

/// Parses a scenario file. Throws std::runtime_error naming the offending
/// line for malformed input, out-of-bounds obstacles, or a start pose inside
/// an obstacle.
LoadedScenario load_scenario(const std::string& path);
LoadedScenario parse_scenario(const std::string& text, const std::string& name);

/// Validates the world invariants shared with load_scenario.
World make_world(const AABB& bounds, std::vector<AABB> obstacles, const State& start);

/// Serializes a world (plus optional parameter lines) in the scenario format.
std::string scenario_to_text(const World& world,
                             const std::map<std::string, double>& params);

/// Casts the sensor's n_h x n_v ray grid from the given state and returns
/// exact ray/box intersections. Deterministic. Throws when the pose is inside
/// an obstacle or outside the bounds.
Scan simulate_lidar(const World& world, const State& state, const SensorModel& sensor);

/// Voxels reachable from the start by prism-collision-free 6-connected steps,
/// in the linear indexing of an OccupancyMap built over world.bounds at
/// resolution r. The ground-truth denominator for completion metrics.
struct ReachableSet {
  std::vector<std::int64_t> voxel_ids;
  double volume_m3{0.0};
};
ReachableSet compute_reachable(const World& world, double r, const Vec3& prism_dims);
double reachable_free_volume(const World& world, double r, const Vec3& prism_dims);

/// Seeded maze generator: recursive backtracker on a cell lattice, then a
/// braid pass that opens the given fraction of the remaining interior walls
/// (braid 0 = perfect maze, tree topology; braid > 0 adds loops). Corridor
/// width is cell_size - wall_thickness; colinear wall runs are merged into
/// single boxes. The start pose sits in the first corridor cell.
World generate_maze(std::uint64_t seed, int cells_x, int cells_y, double cell_size,
                    double wall_thickness, double height, double braid = 0.0);

}  // namespace nbv
