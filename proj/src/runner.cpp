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

#include "nbv/runner.hpp"

#include <chrono>
#include <set>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace nbv {

namespace {

double leg_duration(const State& a, const State& b, double v_max, double yaw_rate) {
  const double move = (b.p - a.p).norm() / v_max;
  const double turn = std::abs(wrap_angle(b.yaw - a.yaw)) / yaw_rate;
  return std::max(move, turn);
}

}  // namespace

std::pair<State, double> execute_path(const State& state, std::span<const State> yawed,
                                      double v_max, double yaw_rate_max) {
  State cur = state;
  double elapsed = 0.0;
  for (const State& wp : yawed) {
    elapsed += leg_duration(cur, wp, v_max, yaw_rate_max);
    cur = wp;
  }
  return {cur, elapsed};
}

bool check_termination(const TerminationInputs& in) {
  if (in.max_sim_time_s > 0.0 && in.sim_time_s >= in.max_sim_time_s) return true;
  if (in.unknown_reachable_m3 >= in.completion_threshold_m3) return false;
  return in.low_gain_streak >= in.k_low_gain || in.unknown_reachable_m3 <= 0.0;
}

const char* mode_name(PlannerMode mode) {
  return mode == PlannerMode::RscCuboid ? "rsc-cuboid" : "raycast-baseline";
}

PlannerMode mode_from_name(const std::string& name) {
  if (name == "rsc-cuboid") return PlannerMode::RscCuboid;
  if (name == "raycast-baseline") return PlannerMode::RaycastBaseline;
  throw std::invalid_argument("unknown planner mode: " + name);
}

void apply_scenario_params(RunConfig& cfg, const std::map<std::string, double>& params) {
  auto get = [&](const char* key, auto setter) {
    const auto it = params.find(key);
    if (it != params.end()) setter(it->second);
  };
  get("resolution", [&](double v) { cfg.resolution = v; });
  get("rmax", [&](double v) { cfg.sensor.r_max = v; });
  get("alpha_h", [&](double v) { cfg.sensor.alpha_h_deg = v; });
  get("alpha_v", [&](double v) { cfg.sensor.alpha_v_deg = v; });
  get("rays_h", [&](double v) { cfg.sensor.n_h = static_cast<int>(v); });
  get("rays_v", [&](double v) { cfg.sensor.n_v = static_cast<int>(v); });
  get("mount_pitch", [&](double v) { cfg.sensor.mount_pitch = v; });
  get("vmax", [&](double v) { cfg.v_max = v; });
  get("yawrate", [&](double v) { cfg.yaw_rate_max = v; });
  get("lambda", [&](double v) { cfg.lambda = v; });
  get("irange", [&](double v) { cfg.i_range = v; });
  get("lmax", [&](double v) { cfg.l_max = v; });
  get("nmax", [&](double v) { cfg.n_max = static_cast<int>(v); });
  get("edge_max", [&](double v) { cfg.max_edge_len = v; });
  get("gzero", [&](double v) { cfg.g_zero = v; });
  get("dmax_planner", [&](double v) { cfg.d_max_planner = v; });
  get("rc_rays", [&](double v) { cfg.rc_rays = static_cast<int>(v); });
  get("zmin", [&](double v) { cfg.z_min = v; });
  get("zmax", [&](double v) { cfg.z_max = v; });
  get("prism_l", [&](double v) { cfg.prism.x = v; });
  get("prism_w", [&](double v) { cfg.prism.y = v; });
  get("prism_h", [&](double v) { cfg.prism.z = v; });
  get("completion_fraction", [&](double v) { cfg.completion_fraction = v; });
  get("k_low_gain", [&](double v) { cfg.k_low_gain = static_cast<int>(v); });
  get("attempt_factor", [&](double v) { cfg.attempt_factor = static_cast<int>(v); });
  get("recovery", [&](double v) { cfg.recovery = v != 0.0; });
  get("full_path", [&](double v) { cfg.execute_full_path = v != 0.0; });
  get("max_sim_time", [&](double v) { cfg.max_sim_time = v; });
}

namespace {

struct RunContext {
  const World& world;
  const RunConfig& cfg;
  OccupancyMap map;
  ReachableSet reach;
  double total_quantized_m3{0.0};
  State state;
  History history;
  std::mt19937_64 rng;
  double motion_s{0.0};
  double tc_s{0.0};
  ExplorationLog log;
  // Voxels already used as recovery targets. The map only ever loses unknown
  // space, so a target that has been flown to and scanned never improves;
  // whatever score it retains is unobservable residue.
  std::set<std::int64_t> consumed_targets;

  RunContext(const World& w, const RunConfig& c)
      : world(w), cfg(c), map(w.bounds, c.resolution), state(w.start), rng(c.seed) {}

  void do_scan() {
    const Scan scan = simulate_lidar(world, state, cfg.sensor);
    map.integrate_scan(scan.origin, scan.hits, scan.miss_dirs, cfg.sensor.r_max);
  }

  double explored_m3() const { return total_quantized_m3 - map.unknown_volume(); }

  double unknown_reachable_m3() const {
    std::int64_t unknown = 0;
    for (const std::int64_t id : reach.voxel_ids) {
      if (map.state_by_index(id) == CellState::Unknown) ++unknown;
    }
    const double r = cfg.resolution;
    return static_cast<double>(unknown) * r * r * r;
  }

  void move_to(const State& target) {
    motion_s += leg_duration(state, target, cfg.v_max, cfg.yaw_rate_max);
    state = target;
  }

  void append_record(int iter, double t_c_ms, bool dead_end, const GrowStats& stats) {
    IterationRecord rec;
    rec.iter = iter;
    rec.t_c_ms = t_c_ms;
    rec.explored_m3 = explored_m3();
    rec.state = state;
    rec.dead_end = dead_end;
    rec.stats = stats;
    rec.motion_s = motion_s;
    rec.sim_s = motion_s + tc_s;
    log.records.push_back(rec);
  }

  // "Simple trajectory in close proximity to the initial point": one in-place
  // 360 degree yaw sweep, a 0.5 m square hop, and a vertical pass through the
  // flight band, sensing at every station. A narrow vertical FOV leaves a
  // blind bicone around a hovering sensor, so without the vertical pass the
  // collision prism could never be confirmed free anywhere near the start.
  // Legs are trusted against ground truth only (the map is still unknown).
  void initial_sweep(double z_min, double z_max) {
    do_scan();
    const double yaw0 = state.yaw;
    for (int k = 1; k <= 4; ++k) {
      move_to({state.p, wrap_angle(yaw0 + k * M_PI / 2.0)});
      do_scan();
    }
    const Vec3 base = state.p;
    const Vec3 corners[4] = {base + Vec3{0.5, 0.0, 0.0}, base + Vec3{0.5, 0.5, 0.0},
                             base + Vec3{0.0, 0.5, 0.0}, base};
    for (const Vec3& c : corners) {
      if (world.prism_collides(c, cfg.prism)) continue;
      move_to({c, state.yaw});
      do_scan();
    }
    if (!(state.p == base)) move_to({base, state.yaw});

    const double step = cfg.resolution / 2.0;
    auto climb_to = [&](double z_target) {
      while (std::abs(state.p.z - z_target) > 1e-9) {
        const double dz = std::clamp(z_target - state.p.z, -step, step);
        const Vec3 next = state.p + Vec3{0, 0, dz};
        if (world.prism_collides(next, cfg.prism)) return;
        move_to({next, state.yaw});
        do_scan();
      }
    };
    climb_to(z_max);
    climb_to(z_min);
    climb_to(base.z);

    // Residual trim in case the band pass was blocked by ground truth.
    for (int k = 0; k < 4 && !map.prism_free(state.p, cfg.prism); ++k) {
      const Vec3 up = state.p + Vec3{0, 0, step};
      const Vec3 down = state.p - Vec3{0, 0, step};
      if (!world.prism_collides(up, cfg.prism)) {
        move_to({up, state.yaw});
      } else if (!world.prism_collides(down, cfg.prism)) {
        move_to({down, state.yaw});
      } else {
        break;
      }
      do_scan();
    }
  }
};

}  // namespace

ExplorationLog run_exploration(const World& world, const RunConfig& cfg,
                               std::string* final_map_snapshot) {
  if (!(cfg.resolution > 0.0)) throw std::invalid_argument("resolution must be positive");
  if (!(cfg.v_max > 0.0 && cfg.yaw_rate_max > 0.0)) {
    throw std::invalid_argument("speed limits must be positive");
  }

  RunContext ctx(world, cfg);
  ctx.log.scenario = cfg.scenario;
  ctx.log.mode = cfg.mode;
  ctx.log.seed = cfg.seed;
  ctx.log.resolution = cfg.resolution;

  {
    // Quantized denominator for "explored" (voxels whose centers lie in bounds).
    const double full_unknown = ctx.map.unknown_volume();
    ctx.total_quantized_m3 = full_unknown;
  }
  ctx.reach = compute_reachable(world, cfg.resolution, cfg.prism);
  ctx.log.reachable_m3 = ctx.reach.volume_m3;
  const double threshold = cfg.completion_fraction * ctx.reach.volume_m3;

  PlannerParams pp;
  pp.n_max = cfg.n_max;
  pp.max_edge_len = cfg.max_edge_len;
  pp.sampling_bounds = world.bounds;
  pp.z_min = cfg.z_min;
  pp.z_max = cfg.z_max;
  if (cfg.z_max <= cfg.z_min) {
    // Default flight band: half a prism height plus one voxel off floor/ceiling.
    const double margin = cfg.prism.z / 2.0 + cfg.resolution;
    pp.z_min = world.bounds.lo.z + margin;
    pp.z_max = world.bounds.hi.z - margin;
  }
  pp.lambda = cfg.lambda;
  pp.i_range = cfg.i_range;
  pp.l_max = cfg.l_max;
  pp.prism = cfg.prism;
  pp.mode = cfg.mode;
  pp.d_max_planner = cfg.d_max_planner;
  pp.rc_rays = cfg.rc_rays;
  pp.attempt_factor = cfg.attempt_factor;
  std::vector<EdgeGainTrace> edge_trace;
  if (cfg.trace_gains) pp.gain_trace = &edge_trace;

  ctx.initial_sweep(pp.z_min, pp.z_max);
  ctx.history.record_visit(ctx.state.p, 0.0);
  ctx.append_record(0, 0.0, false, GrowStats{});

  int low_gain_streak = 0;
  // After arriving at a recovery target the planner gets a couple of fresh
  // trees before the dead-end logic may drag it elsewhere: a single 20-node
  // RRT can miss a frontier by sampling luck alone.
  Vec3 last_target{};
  int target_grace = 0;
  for (int iter = 1; iter < 1000000; ++iter) {
    if (ctx.motion_s >= cfg.max_sim_time) {
      ctx.log.truncated = true;
      break;
    }
    ctx.do_scan();
    const double unknown_reach = ctx.unknown_reachable_m3();

    if (!ctx.map.prism_free(ctx.state.p, cfg.prism)) {
      ctx.log.failed = true;
      ctx.log.fail_reason = "robot state no longer collision-free in map";
      break;
    }

    const auto t0 = std::chrono::steady_clock::now();
    GrowStats stats;
    edge_trace.clear();
    const Tree tree = grow_tree(ctx.map, ctx.state, pp, ctx.rng, &stats);
    for (const EdgeGainTrace& row : edge_trace) {
      ctx.log.gain_trace.push_back({iter, row});
    }
    const Path path = best_path(tree);
    const double t_c_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    ctx.tc_s += t_c_ms / 1000.0;

    if (path.total_gain < cfg.g_zero) ++low_gain_streak;
    else low_gain_streak = 0;

    TerminationInputs term;
    term.low_gain_streak = low_gain_streak;
    term.k_low_gain = cfg.k_low_gain;
    term.unknown_reachable_m3 = unknown_reach;
    term.completion_threshold_m3 = threshold;
    term.sim_time_s = ctx.motion_s;
    term.max_sim_time_s = cfg.max_sim_time;
    if (check_termination(term)) {
      ctx.append_record(iter, t_c_ms, false, stats);
      ctx.log.truncated = ctx.motion_s >= cfg.max_sim_time;
      break;
    }

    DeadEndStats ds;
    ds.best_gain = path.total_gain;
    ds.budget_exhausted = stats.budget_exhausted;
    ds.g_zero = cfg.g_zero;
    ds.unknown_reachable_m3 = unknown_reach;
    ds.completion_threshold_m3 = threshold;
    const bool dead = detect_dead_end(ds);

    if (dead && cfg.recovery) {
      if (target_grace > 0 && (ctx.state.p - last_target).norm() < 1e-9) {
        --target_grace;
        ctx.append_record(iter, t_c_ms, true, stats);
        continue;  // replan in place with fresh samples
      }
      // Re-score the stored nodes against the current map: the return target
      // is the node with the highest information gain at this moment, ties to
      // the most recent visit. Targets already used once are skipped.
      std::size_t best_idx = 0;
      double best_score = -1.0;
      std::map<std::int64_t, double> score_cache;
      for (std::size_t i = 0; i < ctx.history.size(); ++i) {
        const Vec3 p = ctx.history.entry(i).pos;
        const auto v = ctx.map.voxel_of(p);
        const std::int64_t key = v ? ctx.map.linear_index(*v) : -1;
        if (ctx.consumed_targets.count(key)) continue;
        auto it = score_cache.find(key);
        const double score = it != score_cache.end()
                                 ? it->second
                                 : node_rsc_gain(ctx.map, p, cfg.i_range);
        score_cache[key] = score;
        if (score >= best_score) {
          best_score = score;
          best_idx = i;
        }
      }
      const Vec3 target = ctx.history.entry(best_idx).pos;
      if (best_score <= 0.0) {
        // Nothing anywhere in the history is worth returning to.
        ctx.log.stalled = true;
        ctx.append_record(iter, t_c_ms, true, stats);
        break;
      }
      const auto tv = ctx.map.voxel_of(target);
      ctx.consumed_targets.insert(tv ? ctx.map.linear_index(*tv) : -1);
      if ((target - ctx.state.p).norm() < 1e-9) {
        // Already at the best node; let the next iteration try from here.
        last_target = target;
        target_grace = 2;
        ctx.append_record(iter, t_c_ms, true, stats);
        continue;
      }
      RecoveryPath rec;
      try {
        rec = recovery_path(ctx.history, ctx.map, cfg.prism, best_idx);
      } catch (const UnreachableHistoryError&) {
        // Target unreachable under the current map; try another next time.
        ctx.append_record(iter, t_c_ms, true, stats);
        continue;
      }
      DeadEndEvent ev;
      ev.iter = iter;
      ev.n0 = ctx.state.p;
      ev.nbn = rec.waypoints.back();
      ev.leg_count = static_cast<int>(rec.waypoints.size()) - 1;
      ev.return_dist = rec.length;
      ctx.log.deadend_events.push_back(ev);

      const auto yawed = assign_yaw(rec.waypoints, ctx.state.yaw);
      for (std::size_t k = 1; k < yawed.size(); ++k) {
        ctx.move_to(yawed[k]);
        // Revisits are recorded too: consecutive history entries must remain
        // directly-traveled pairs for the reverse-order fallback to exist.
        ctx.history.record_visit(ctx.state.p, 0.0);
        ctx.do_scan();
      }
      last_target = ctx.state.p;
      target_grace = 2;
      ctx.append_record(iter, t_c_ms, true, stats);
      continue;
    }

    if (dead && !cfg.recovery && stats.budget_exhausted) {
      ctx.log.stalled = true;
      ctx.append_record(iter, t_c_ms, true, stats);
      break;
    }

    // Execute the best path (whole path, or first edge in baseline mode),
    // sensing at each waypoint and aborting a leg that a fresh scan exposed
    // as blocked.
    std::vector<Vec3> waypoints = path.waypoints;
    std::vector<int> node_ids = path.node_ids;
    if (!cfg.execute_full_path && waypoints.size() > 2) {
      waypoints.resize(2);
      node_ids.resize(2);
    }
    const auto yawed = assign_yaw(waypoints, ctx.state.yaw);
    for (std::size_t k = 1; k < yawed.size(); ++k) {
      if (!ctx.map.segment_free(yawed[k - 1].p, yawed[k].p, cfg.prism)) break;
      ctx.move_to(yawed[k]);
      ctx.history.record_visit(ctx.state.p, tree.nodes[node_ids[k]].node_gain);
      ctx.do_scan();
    }
    ctx.append_record(iter, t_c_ms, dead, stats);
  }

  ctx.log.iterations = static_cast<int>(ctx.log.records.size());
  ctx.log.deadend_count = static_cast<int>(ctx.log.deadend_events.size());
  ctx.log.motion_s = ctx.motion_s;
  ctx.log.tc_total_s = ctx.tc_s;
  ctx.log.t_exp_s = ctx.motion_s + ctx.tc_s;
  ctx.log.explored_m3 = ctx.explored_m3();
  const double unknown_reach = ctx.unknown_reachable_m3();
  ctx.log.completion_pct =
      ctx.reach.volume_m3 > 0.0
          ? 100.0 * (1.0 - unknown_reach / ctx.reach.volume_m3)
          : 0.0;
  if (final_map_snapshot) *final_map_snapshot = ctx.map.to_snapshot();
  return ctx.log;
}

ExplorationLog run_exploration_scenario(const RunConfig& cfg) {
  const LoadedScenario sc = load_scenario(cfg.scenario);
  RunConfig layered = cfg;
  apply_scenario_params(layered, sc.params);
  return run_exploration(sc.world, layered);
}

std::string log_to_csv(const ExplorationLog& log) {
  std::ostringstream out;
  char buf[256];
  out << "# nbvrun 1\n";
  out << "iter,t_c_ms,explored_m3,x,y,z,yaw,dead_end,mode,seed\n";
  for (const IterationRecord& r : log.records) {
    std::snprintf(buf, sizeof buf, "%d,%.3f,%.6f,%.9g,%.9g,%.9g,%.9g,%d,%s,%llu\n",
                  r.iter, r.t_c_ms, r.explored_m3, r.state.p.x, r.state.p.y,
                  r.state.p.z, r.state.yaw, r.dead_end ? 1 : 0, mode_name(log.mode),
                  static_cast<unsigned long long>(log.seed));
    out << buf;
  }
  return out.str();
}

std::string log_summary(const ExplorationLog& log) {
  std::ostringstream out;
  char buf[256];
  out << "# nbvsummary 1\nsummary {\n";
  out << "  scenario: " << log.scenario << "\n";
  out << "  mode: " << mode_name(log.mode) << "\n";
  out << "  seed: " << log.seed << "\n";
  std::snprintf(buf, sizeof buf, "  resolution: %.6g\n", log.resolution);
  out << buf;
  out << "  iterations: " << log.iterations << "\n";
  std::snprintf(buf, sizeof buf, "  t_exp_s: %.6f\n  motion_s: %.6f\n  tc_total_s: %.6f\n",
                log.t_exp_s, log.motion_s, log.tc_total_s);
  out << buf;
  std::snprintf(buf, sizeof buf, "  explored_m3: %.6f\n  reachable_m3: %.6f\n",
                log.explored_m3, log.reachable_m3);
  out << buf;
  std::snprintf(buf, sizeof buf, "  completion_pct: %.3f\n", log.completion_pct);
  out << buf;
  out << "  deadends: " << log.deadend_count << "\n";
  out << "  truncated: " << (log.truncated ? 1 : 0) << "\n";
  out << "  stalled: " << (log.stalled ? 1 : 0) << "\n";
  out << "  failed: " << (log.failed ? 1 : 0) << "\n";
  if (log.failed) out << "  fail_reason: " << log.fail_reason << "\n";
  out << "}\n";
  return out.str();
}

std::string planner_trace_csv(const ExplorationLog& log) {
  std::ostringstream out;
  char buf[160];
  out << "# nbvtrace 1\niter,nodes,attempts,accepted,best_gain_m3,t_c_ms\n";
  for (const IterationRecord& r : log.records) {
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%d,%.6f,%.3f\n", r.iter,
                  r.stats.accepted + 1, r.stats.attempts, r.stats.accepted,
                  r.stats.best_gain, r.t_c_ms);
    out << buf;
  }
  return out.str();
}

std::string gain_trace_csv(const ExplorationLog& log) {
  std::ostringstream out;
  char buf[256];
  out << "# nbvgains 1\niter,edge_id,parent_id,from_x,from_y,from_z,to_x,to_y,to_z,"
         "gain_m3,fov_sources\n";
  for (const GainTraceRow& r : log.gain_trace) {
    std::snprintf(buf, sizeof buf, "%d,%d,%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.6f,%d\n",
                  r.iter, r.edge.edge_id, r.edge.parent_id, r.edge.from.x, r.edge.from.y,
                  r.edge.from.z, r.edge.to.x, r.edge.to.y, r.edge.to.z, r.edge.gain_m3,
                  r.edge.fov_sources);
    out << buf;
  }
  return out.str();
}

std::string deadend_events_csv(const ExplorationLog& log) {
  std::ostringstream out;
  char buf[256];
  out << "# nbvdeadend 1\niter,n0_x,n0_y,n0_z,nbn_x,nbn_y,nbn_z,legs,return_dist_m\n";
  for (const DeadEndEvent& e : log.deadend_events) {
    std::snprintf(buf, sizeof buf, "%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%d,%.6f\n", e.iter,
                  e.n0.x, e.n0.y, e.n0.z, e.nbn.x, e.nbn.y, e.nbn.z, e.leg_count,
                  e.return_dist);
    out << buf;
  }
  return out.str();
}

}  // namespace nbv
