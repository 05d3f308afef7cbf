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

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "nbv/benchmark.hpp"
#include "nbv/grid_map.hpp"
#include "nbv/runner.hpp"
#include "nbv/world.hpp"

namespace {

// Config files use the same flat key/value grammar as the parameter lines of
// scenario files (one "key value" pair per line, '#' comments).
std::map<std::string, double> parse_kv_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config file: " + path);
  std::map<std::string, double> out;
  std::string line;
  int line_no = 0;
  while (std::getline(f, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    double value;
    if (!(ls >> key)) continue;
    if (!(ls >> value)) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) +
                               ": expected 'key value'");
    }
    out[key] = value;
  }
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << content;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sampling-based next-best-view exploration planner with "
               "shadowcasting gain evaluation"};
  app.require_subcommand(1);

  // --- run ---------------------------------------------------------------
  auto* run = app.add_subcommand("run", "Run one exploration and write its logs");
  std::string scenario, mode_str = "rsc-cuboid", out_dir, config_path, save_map;
  double resolution = 0.0, max_wall_time = 0.0;
  std::uint64_t seed = 1;
  bool no_recovery = false, trace = false;
  run->add_option("--scenario", scenario, "Scenario file")->required();
  run->add_option("--resolution", resolution, "Map resolution [m], overrides scenario");
  run->add_option("--mode", mode_str, "rsc-cuboid | raycast-baseline");
  run->add_option("--seed", seed, "RNG seed");
  run->add_option("--out", out_dir, "Output directory for CSV logs");
  run->add_option("--max-wall-time", max_wall_time, "Simulated-time cap [s]");
  run->add_option("--config", config_path, "Key/value parameter override file");
  run->add_option("--save-map", save_map, "Write the final map snapshot here");
  run->add_flag("--no-recovery", no_recovery, "Disable dead-end recovery");
  run->add_flag("--trace", trace, "Also write planner and dead-end traces");

  // --- bench -------------------------------------------------------------
  auto* bench = app.add_subcommand("bench", "Run a benchmark batch and aggregate");
  std::vector<std::string> b_scenarios, b_modes;
  std::string b_out, b_config;
  double b_resolution = 0.0, b_wall = 0.0;
  int b_runs = 5;
  std::uint64_t b_seed = 1;
  bench->add_option("--scenario", b_scenarios, "Scenario file(s)")->required();
  bench->add_option("--resolution", b_resolution, "Map resolution [m] for all rows");
  bench->add_option("--mode", b_modes, "Mode(s); default: both");
  bench->add_option("--runs", b_runs, "Repetitions per row")->check(CLI::PositiveNumber);
  bench->add_option("--seed", b_seed, "Base seed (seeds are seed..seed+runs-1)");
  bench->add_option("--out", b_out, "Output directory")->required();
  bench->add_option("--max-wall-time", b_wall, "Simulated-time cap [s]");
  bench->add_option("--config", b_config, "Key/value parameter override file");

  // --- gen-maze ----------------------------------------------------------
  auto* gen = app.add_subcommand("gen-maze", "Generate a seeded maze scenario file");
  std::uint64_t g_seed = 1;
  int g_cx = 10, g_cy = 10;
  double g_cell = 2.0, g_wall = 0.4, g_height = 2.5, g_braid = 0.0;
  std::string g_out;
  gen->add_option("--seed", g_seed, "Maze seed");
  gen->add_option("--cells-x", g_cx, "Lattice cells in x");
  gen->add_option("--cells-y", g_cy, "Lattice cells in y");
  gen->add_option("--cell-size", g_cell, "Cell pitch [m]");
  gen->add_option("--wall", g_wall, "Wall thickness [m]");
  gen->add_option("--height", g_height, "World height [m]");
  gen->add_option("--braid", g_braid, "Fraction of extra walls to open into loops");
  gen->add_option("--out", g_out, "Output scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      const nbv::LoadedScenario sc = nbv::load_scenario(scenario);
      nbv::RunConfig cfg;
      cfg.scenario = scenario;
      nbv::apply_scenario_params(cfg, sc.params);
      if (!config_path.empty()) nbv::apply_scenario_params(cfg, parse_kv_file(config_path));
      cfg.mode = nbv::mode_from_name(mode_str);
      if (cfg.mode == nbv::PlannerMode::RaycastBaseline) {
        cfg.recovery = false;
        cfg.execute_full_path = false;
      }
      if (no_recovery) cfg.recovery = false;
      cfg.trace_gains = trace;
      if (resolution > 0.0) cfg.resolution = resolution;
      if (max_wall_time > 0.0) cfg.max_sim_time = max_wall_time;
      cfg.seed = seed;

      std::string map_snapshot;
      const nbv::ExplorationLog log = nbv::run_exploration(
          sc.world, cfg, save_map.empty() ? nullptr : &map_snapshot);
      std::cout << nbv::log_summary(log);
      if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        const std::string stem =
            out_dir + "/" + std::filesystem::path(scenario).stem().string() + "_seed" +
            std::to_string(seed);
        write_file(stem + ".csv", nbv::log_to_csv(log));
        write_file(stem + ".curve.csv", nbv::emit_volume_curve(log));
        write_file(stem + ".summary.txt", nbv::log_summary(log));
        if (trace) {
          write_file(stem + ".trace.csv", nbv::planner_trace_csv(log));
          write_file(stem + ".deadends.csv", nbv::deadend_events_csv(log));
          write_file(stem + ".gains.csv", nbv::gain_trace_csv(log));
        }
      }
      if (!save_map.empty()) write_file(save_map, map_snapshot);
      return log.failed ? 1 : 0;
    }

    if (*bench) {
      nbv::BenchmarkSpec spec;
      if (b_modes.empty()) b_modes = {"rsc-cuboid", "raycast-baseline"};
      for (const std::string& s : b_scenarios) {
        for (const std::string& m : b_modes) {
          spec.rows.push_back({s, b_resolution, nbv::mode_from_name(m)});
        }
      }
      for (int i = 0; i < b_runs; ++i) spec.seeds.push_back(b_seed + i);
      spec.out_dir = b_out;
      if (!b_config.empty()) nbv::apply_scenario_params(spec.base, parse_kv_file(b_config));
      if (b_wall > 0.0) spec.base.max_sim_time = b_wall;

      const nbv::BenchmarkResult result = nbv::run_benchmark(spec);
      std::cout << nbv::summary_csv(result.rows);
      return result.any_failed ? 1 : 0;
    }

    if (*gen) {
      const nbv::World maze = nbv::generate_maze(g_seed, g_cx, g_cy, g_cell, g_wall, g_height, g_braid);
      std::map<std::string, double> params;
      params["resolution"] = 0.2;
      write_file(g_out, nbv::scenario_to_text(maze, params));
      std::cout << "wrote " << g_out << " (" << maze.obstacles.size() << " wall boxes)\n";
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
