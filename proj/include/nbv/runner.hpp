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

#include "nbv/deadend.hpp"
#include "nbv/planner.hpp"
#include "nbv/world.hpp"

namespace nbv {

/// Full configuration of one exploration run. Scenario files provide
/// per-environment defaults (apply_scenario_params); config files and CLI
/// flags override them.
struct RunConfig {
  std::string scenario;
  double resolution{0.2};
  SensorModel sensor{};
  double v_max{1.0};          ///< max linear speed, applied to leg length [m/s]
  double yaw_rate_max{0.8};   ///< max yaw rate [rad/s]
  double lambda{0.3};
  double i_range{5.0};
  double l_max{4.0};
  int n_max{20};
  double max_edge_len{1.5};
  double g_zero{0.1};         ///< gain threshold [m^3]
  PlannerMode mode{PlannerMode::RscCuboid};
  bool recovery{true};
  bool execute_full_path{true};  ///< false = first edge only (baseline behaviour)
  double d_max_planner{1.5};
  int rc_rays{360};           ///< baseline rays per slice (sensor azimuth density)
  double z_min{0.0};
  double z_max{0.0};          ///< flight band; both 0 = derived from bounds
  Vec3 prism{0.6, 0.6, 0.5};
  std::uint64_t seed{1};
  double max_sim_time{600.0};      ///< cap on simulated motion time [s]
  double completion_fraction{0.02};  ///< of reachable free volume
  int k_low_gain{3};
  int attempt_factor{100};
  bool trace_gains{false};  ///< collect per-edge gain rows in the log
};

/// Applies scenario-file key/value parameters onto a config. Unknown keys are
/// ignored so scenario files can carry annotations.
void apply_scenario_params(RunConfig& cfg, const std::map<std::string, double>& params);

const char* mode_name(PlannerMode mode);
PlannerMode mode_from_name(const std::string& name);

struct IterationRecord {
  int iter{0};
  double t_c_ms{0.0};
  double explored_m3{0.0};
  State state;
  bool dead_end{false};
  GrowStats stats;
  double motion_s{0.0};  ///< cumulative simulated motion time
  double sim_s{0.0};     ///< cumulative motion + computation time
};

struct GainTraceRow {
  int iter{0};
  EdgeGainTrace edge;
};

struct DeadEndEvent {
  int iter{0};
  Vec3 n0;
  Vec3 nbn;
  int leg_count{0};
  double return_dist{0.0};
};

struct ExplorationLog {
  std::string scenario;
  PlannerMode mode{PlannerMode::RscCuboid};
  std::uint64_t seed{0};
  double resolution{0.0};
  std::vector<IterationRecord> records;
  std::vector<DeadEndEvent> deadend_events;
  std::vector<GainTraceRow> gain_trace;
  double reachable_m3{0.0};
  double explored_m3{0.0};
  double completion_pct{0.0};
  double motion_s{0.0};
  double tc_total_s{0.0};
  double t_exp_s{0.0};  ///< motion_s + tc_total_s
  int iterations{0};
  int deadend_count{0};
  bool truncated{false};  ///< stopped by the simulated-time cap
  bool stalled{false};    ///< sampling budget exhausted with recovery disabled,
                          ///< or recovery targets exhausted
  bool failed{false};
  std::string fail_reason;
};

/// Runs the closed exploration loop (sense, integrate, plan, recover or
/// execute, log) until the completion criterion or the simulated-time cap.
/// When final_map_snapshot is non-null it receives the final map in the
/// snapshot text format.
ExplorationLog run_exploration(const World& world, const RunConfig& cfg,
                               std::string* final_map_snapshot = nullptr);

/// Convenience wrapper: loads cfg.scenario, applies the scenario file's
/// parameters on top of cfg, and runs. Callers that need to override
/// scenario parameters should layer configs themselves and call
/// run_exploration(world, cfg) directly (the CLI does).
ExplorationLog run_exploration_scenario(const RunConfig& cfg);

/// Kinematic execution of a yaw-annotated path: per leg the duration is
/// max(|dp| / v_max, |wrapped dyaw| / yaw_rate_max); returns the final state
/// and the summed duration. Pure function of its inputs.
std::pair<State, double> execute_path(const State& state, std::span<const State> yawed,
                                      double v_max, double yaw_rate_max);

struct TerminationInputs {
  int low_gain_streak{0};
  int k_low_gain{3};
  double unknown_reachable_m3{0.0};
  double completion_threshold_m3{0.0};
  double sim_time_s{0.0};
  double max_sim_time_s{0.0};
};

/// True when exploration is complete (K consecutive sub-threshold gains with
/// the unknown reachable volume below the completion threshold, or nothing
/// reachable left unknown) or the simulated-time cap is hit.
bool check_termination(const TerminationInputs& in);

std::string log_to_csv(const ExplorationLog& log);
std::string log_summary(const ExplorationLog& log);
std::string planner_trace_csv(const ExplorationLog& log);
std::string deadend_events_csv(const ExplorationLog& log);

/// Per-edge gain rows (populated when RunConfig::trace_gains is set):
/// iter,edge_id,parent_id,from_*,to_*,gain_m3,fov_sources.
std::string gain_trace_csv(const ExplorationLog& log);

}  // namespace nbv
