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

#include <vector>

#include "nbv/grid_map.hpp"

namespace nbv {

struct EdgeGainParams {
  double i_range{5.0};  ///< lateral/vertical half-extent of the edge cuboid [m]
  double l_max{4.0};    ///< max edge span covered by one FOV source [m]
  double lambda{0.3};   ///< motion-cost weight in the node-gain recursion
};

struct EdgeGain {
  int edge_id{0};
  double gain_m3{0.0};
  int fov_source_count{0};
};

/// FOV source points covering the edge [n_prev, n_k]: the midpoint when the
/// edge fits under l_max, otherwise ceil(l_c / l_max) sub-segment midpoints.
std::vector<Vec3> fov_sources(const Vec3& n_prev, const Vec3& n_k, double l_max);

/// Information gain of one RRT edge: a cuboid of length l_c and lateral /
/// vertical half-extent i_range is placed around the edge, aligned with the
/// edge's horizontal direction; recursive shadowcasting runs on every
/// horizontal slice (vertical step = map resolution) from every FOV source,
/// clipped to the cuboid cross-section; the gain is the volume of distinct
/// Unknown voxels marked visible. Both endpoints must lie inside the map.
EdgeGain edge_gain(const OccupancyMap& map, const Vec3& n_prev, const Vec3& n_k,
                   const EdgeGainParams& params, int edge_id = 0);

/// One step of the node-gain recursion: i_prev + gain * exp(-lambda * dist).
/// The planner passes the cumulative Euclidean path length to the node, so
/// the exponential weighs the full motion cost of collecting the gain.
double node_gain(double i_prev, double edge_gain_m3, double dist, double lambda);

/// Raycasting node gain used by the receding-horizon baseline: per-slice
/// fixed-ray casting within d_max of the node (the cylinder of radius and
/// half-height d_max), summing visible Unknown volume.
double node_raycast_gain(const OccupancyMap& map, const Vec3& node, double d_max,
                         int n_rays);

/// Shadowcasting gain of a single position: visible Unknown volume inside the
/// axis-aligned box of half extent i_range around the node. Used to re-score
/// history nodes against the current map when resolving a dead end.
double node_rsc_gain(const OccupancyMap& map, const Vec3& node, double i_range);

}  // namespace nbv
