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
#include <stdexcept>
#include <vector>

#include "nbv/grid_map.hpp"

namespace nbv {

struct HistoryEntry {
  Vec3 pos;
  double gain{0.0};  ///< node gain recorded when the waypoint was visited
  std::int64_t visit_index{0};
};

/// Visited waypoints of executed paths, in visit order. Entries are never
/// removed.
class History {
 public:
  void record_visit(const Vec3& pos, double gain);
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const HistoryEntry& entry(std::size_t i) const { return entries_[i]; }
  const std::vector<HistoryEntry>& entries() const { return entries_; }

  /// Index of the best node n_bn: maximal recorded gain, ties to the most
  /// recent visit. History must be non-empty.
  std::size_t best_index() const;

 private:
  std::vector<HistoryEntry> entries_;
  std::int64_t next_index_{0};
};

struct DeadEndStats {
  double best_gain{0.0};
  bool budget_exhausted{false};
  double g_zero{0.0};
  double unknown_reachable_m3{0.0};
  double completion_threshold_m3{0.0};
};

/// True iff the iteration failed to find a worthwhile path (gain under g_zero
/// or the sampling budget ran out) while unexplored reachable volume remains
/// above the completion threshold.
bool detect_dead_end(const DeadEndStats& stats);

struct RecoveryPath {
  std::vector<Vec3> waypoints;          ///< starts at n_0, ends at n_bn
  std::vector<std::size_t> history_indices;
  double length{0.0};
};

struct UnreachableHistoryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Shortest-shortcut return to the best historical node: starting from the
/// current node, repeatedly connect straight to the candidate closest to n_bn
/// (scanning from n_bn backward) that passes the swept-prism check, until
/// n_bn is reached. The single reverse visit step is the walk's built-in
/// fallback; throws UnreachableHistoryError when no collision-free return
/// exists at all. The two-argument form targets the stored-gain best node;
/// the runner re-scores history against the current map and passes the
/// target explicitly.
RecoveryPath recovery_path(const History& history, const OccupancyMap& map,
                           const Vec3& prism_dims);
RecoveryPath recovery_path(const History& history, const OccupancyMap& map,
                           const Vec3& prism_dims, std::size_t target_index);

}  // namespace nbv
