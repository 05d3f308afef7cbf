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

#include <random>
#include <span>
#include <vector>

#include "nbv/gain.hpp"
#include "nbv/grid_map.hpp"
#include "nbv/world.hpp"

namespace nbv {

enum class PlannerMode { RscCuboid, RaycastBaseline };

struct TreeNode {
  int id{0};
  Vec3 pos;
  int parent{-1};          ///< -1 for the root
  double node_gain{0.0};   ///< I(n): parent gain + edge gain * exp(-lambda * path_len)
  double edge_gain{0.0};   ///< gain of the incoming edge [m^3]
  double edge_len{0.0};
  double path_len{0.0};    ///< cumulative Euclidean length from the root
};

struct Tree {
  std::vector<TreeNode> nodes;

  /// Node ids from the root to `id`, inclusive.
  std::vector<int> chain_to(int id) const;
};

struct EdgeGainTrace {
  int edge_id{0};
  int parent_id{0};
  Vec3 from;
  Vec3 to;
  double gain_m3{0.0};
  int fov_sources{0};
};

struct PlannerParams {
  int n_max{20};
  double max_edge_len{1.5};
  AABB sampling_bounds;     ///< intersected with the map bounds by grow_tree
  double z_min{0.0};
  double z_max{0.0};        ///< flight band; z_max <= z_min disables the clamp
  double lambda{0.3};
  double i_range{5.0};
  double l_max{4.0};
  Vec3 prism{0.6, 0.6, 0.5};
  PlannerMode mode{PlannerMode::RscCuboid};
  double d_max_planner{1.5};  ///< raycast gain radius (baseline mode)
  int rc_rays{360};           ///< rays per slice (baseline mode)
  int attempt_factor{100};    ///< sampling attempt cap = factor * n_max
  std::vector<EdgeGainTrace>* gain_trace{nullptr};  ///< optional debug sink
};

struct GrowStats {
  int attempts{0};
  int accepted{0};
  bool budget_exhausted{false};  ///< cap hit with zero accepted nodes
  double best_gain{0.0};
  int best_id{0};
};

/// Grows an RRT from root_state: uniform position samples, nearest-node
/// steering to max_edge_len, prism-swept collision acceptance, and per-edge
/// gain evaluation in the configured mode. Deterministic for a fixed rng
/// state. Throws std::invalid_argument when the root is not prism-free.
Tree grow_tree(const OccupancyMap& map, const State& root_state,
               const PlannerParams& params, std::mt19937_64& rng,
               GrowStats* stats = nullptr);

struct Path {
  std::vector<int> node_ids;
  std::vector<Vec3> waypoints;
  double total_gain{0.0};
  double length{0.0};
};

/// Root-to-leaf path maximizing the node gain; ties broken by shorter path
/// length, then lower node id.
Path best_path(const Tree& tree);

/// Yaw-annotated waypoints: the first keeps the current yaw, later ones face
/// the incoming step direction (quadrant-correct); zero horizontal steps keep
/// the previous yaw. All yaws normalized to [-pi, pi).
std::vector<State> assign_yaw(std::span<const Vec3> waypoints, double current_yaw);

}  // namespace nbv
