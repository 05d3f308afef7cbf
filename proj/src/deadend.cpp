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

#include "nbv/deadend.hpp"

namespace nbv {

void History::record_visit(const Vec3& pos, double gain) {
  entries_.push_back(HistoryEntry{pos, gain, next_index_++});
}

std::size_t History::best_index() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].gain >= entries_[best].gain) best = i;  // ties: most recent
  }
  return best;
}

bool detect_dead_end(const DeadEndStats& s) {
  const bool no_progress = s.best_gain < s.g_zero || s.budget_exhausted;
  return no_progress && s.unknown_reachable_m3 > s.completion_threshold_m3;
}

RecoveryPath recovery_path(const History& history, const OccupancyMap& map,
                           const Vec3& prism_dims) {
  if (history.empty()) {
    throw UnreachableHistoryError("recovery_path: empty history");
  }
  return recovery_path(history, map, prism_dims, history.best_index());
}

RecoveryPath recovery_path(const History& history, const OccupancyMap& map,
                           const Vec3& prism_dims, std::size_t target_index) {
  if (history.empty()) {
    throw UnreachableHistoryError("recovery_path: empty history");
  }
  if (target_index >= history.size()) {
    throw UnreachableHistoryError("recovery_path: target index out of range");
  }
  const std::size_t current = history.size() - 1;  // n_0
  const std::size_t best = target_index;           // n_bn

  RecoveryPath path;
  path.history_indices.push_back(current);
  path.waypoints.push_back(history.entry(current).pos);

  // Greedy anchor walk of the return algorithm: from the current anchor, jump
  // straight to the candidate closest to n_bn that is reachable; scanning up
  // to anchor-1 makes the single reverse visit step the built-in fallback.
  std::size_t anchor = current;
  while (anchor != best) {
    std::size_t found = anchor;  // sentinel
    for (std::size_t j = best; j < anchor; ++j) {
      if (map.segment_free(history.entry(anchor).pos, history.entry(j).pos,
                           prism_dims)) {
        found = j;
        break;
      }
    }
    if (found == anchor) {
      throw UnreachableHistoryError(
          "recovery_path: no collision-free return to the best node");
    }
    path.length += (history.entry(found).pos - history.entry(anchor).pos).norm();
    path.history_indices.push_back(found);
    path.waypoints.push_back(history.entry(found).pos);
    anchor = found;
  }
  return path;
}

}  // namespace nbv
