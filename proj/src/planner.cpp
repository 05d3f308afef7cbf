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

#include "nbv/planner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nbv {

std::vector<int> Tree::chain_to(int id) const {
  std::vector<int> chain;
  for (int cur = id; cur >= 0; cur = nodes[cur].parent) chain.push_back(cur);
  std::reverse(chain.begin(), chain.end());
  return chain;
}

namespace {

// Uniform double in [0, 1) from the raw generator bits; avoids the
// implementation-defined std::uniform_real_distribution.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double edge_gain_for_mode(const OccupancyMap& map, const Vec3& from, const Vec3& to,
                          const PlannerParams& p, int edge_id, int parent_id) {
  double gain;
  int sources = 1;
  if (p.mode == PlannerMode::RaycastBaseline) {
    gain = node_raycast_gain(map, to, p.d_max_planner, p.rc_rays);
  } else {
    EdgeGainParams gp;
    gp.i_range = p.i_range;
    gp.l_max = p.l_max;
    gp.lambda = p.lambda;
    const EdgeGain eg = edge_gain(map, from, to, gp, edge_id);
    gain = eg.gain_m3;
    sources = eg.fov_source_count;
  }
  if (p.gain_trace) {
    p.gain_trace->push_back({edge_id, parent_id, from, to, gain, sources});
  }
  return gain;
}

}  // namespace

Tree grow_tree(const OccupancyMap& map, const State& root_state,
               const PlannerParams& params, std::mt19937_64& rng, GrowStats* stats) {
  if (!map.prism_free(root_state.p, params.prism)) {
    throw std::invalid_argument("grow_tree: root is not collision-free");
  }

  AABB box = params.sampling_bounds;
  box.lo.x = std::max(box.lo.x, map.bounds().lo.x);
  box.lo.y = std::max(box.lo.y, map.bounds().lo.y);
  box.lo.z = std::max(box.lo.z, map.bounds().lo.z);
  box.hi.x = std::min(box.hi.x, map.bounds().hi.x);
  box.hi.y = std::min(box.hi.y, map.bounds().hi.y);
  box.hi.z = std::min(box.hi.z, map.bounds().hi.z);
  if (params.z_max > params.z_min) {
    box.lo.z = std::max(box.lo.z, params.z_min);
    box.hi.z = std::min(box.hi.z, params.z_max);
  }

  Tree tree;
  tree.nodes.push_back(TreeNode{0, root_state.p, -1, 0.0, 0.0, 0.0});

  GrowStats local;
  const int max_attempts = params.attempt_factor * params.n_max;

  while (static_cast<int>(tree.nodes.size()) < params.n_max &&
         local.attempts < max_attempts) {
    ++local.attempts;
    Vec3 sample{box.lo.x + unit_uniform(rng) * (box.hi.x - box.lo.x),
                box.lo.y + unit_uniform(rng) * (box.hi.y - box.lo.y),
                box.lo.z + unit_uniform(rng) * (box.hi.z - box.lo.z)};

    int nearest = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (const TreeNode& n : tree.nodes) {
      const double d2 = (sample - n.pos).squared_norm();
      if (d2 < best_d2) {
        best_d2 = d2;
        nearest = n.id;
      }
    }
    const Vec3 from = tree.nodes[nearest].pos;
    Vec3 delta = sample - from;
    const double dist = delta.norm();
    if (dist < 1e-9) continue;
    if (dist > params.max_edge_len) {
      delta = delta * (params.max_edge_len / dist);
      sample = from + delta;
    }
    if (!map.segment_free(from, sample, params.prism)) continue;

    const int id = static_cast<int>(tree.nodes.size());
    const double len = delta.norm();
    const double gain = edge_gain_for_mode(map, from, sample, params, id, nearest);
    TreeNode node;
    node.id = id;
    node.pos = sample;
    node.parent = nearest;
    node.edge_gain = gain;
    node.edge_len = len;
    node.path_len = tree.nodes[nearest].path_len + len;
    // Edge gain weighted by the cost of travelling the whole path to the
    // node, so distant gains are discounted against nearby ones.
    node.node_gain =
        node_gain(tree.nodes[nearest].node_gain, gain, node.path_len, params.lambda);
    tree.nodes.push_back(node);
    ++local.accepted;
  }

  local.budget_exhausted = local.accepted == 0 && local.attempts >= max_attempts;
  int best = 0;
  for (const TreeNode& n : tree.nodes) {
    if (n.node_gain > tree.nodes[best].node_gain) best = n.id;
  }
  local.best_id = best;
  local.best_gain = tree.nodes[best].node_gain;
  if (stats) *stats = local;
  return tree;
}

Path best_path(const Tree& tree) {
  int best = 0;
  for (const TreeNode& n : tree.nodes) {
    if (n.id == 0) continue;  // root is the running best already
    const double cand_gain = n.node_gain;
    const double cur_gain = tree.nodes[best].node_gain;
    if (cand_gain > cur_gain) {
      best = n.id;
    } else if (cand_gain == cur_gain) {
      const double cand_len = n.path_len;
      const double cur_len = tree.nodes[best].path_len;
      if (cand_len < cur_len || (cand_len == cur_len && n.id < best)) {
        best = n.id;
      }
    }
  }

  Path path;
  path.node_ids = tree.chain_to(best);
  path.waypoints.reserve(path.node_ids.size());
  for (int id : path.node_ids) path.waypoints.push_back(tree.nodes[id].pos);
  path.total_gain = tree.nodes[best].node_gain;
  path.length = tree.nodes[best].path_len;
  return path;
}

std::vector<State> assign_yaw(std::span<const Vec3> waypoints, double current_yaw) {
  std::vector<State> out;
  out.reserve(waypoints.size());
  double yaw = wrap_angle(current_yaw);
  for (size_t k = 0; k < waypoints.size(); ++k) {
    if (k > 0) {
      const double dx = waypoints[k].x - waypoints[k - 1].x;
      const double dy = waypoints[k].y - waypoints[k - 1].y;
      if (dx != 0.0 || dy != 0.0) yaw = wrap_angle(std::atan2(dy, dx));
    }
    out.push_back(State{waypoints[k], yaw});
  }
  return out;
}

}  // namespace nbv
