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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>
#include <sstream>

#include "nbv/benchmark.hpp"
#include "nbv/fov.hpp"
#include "nbv/gain.hpp"
#include "nbv/grid_map.hpp"
#include "nbv/planner.hpp"
#include "nbv/runner.hpp"
#include "nbv/world.hpp"

namespace py = pybind11;
using namespace nbv;

PYBIND11_MODULE(nbvrsc, m) {
  m.doc() = "Next-best-view exploration planning with recursive-shadowcasting "
            "information gain";

  py::class_<Vec3>(m, "Vec3")
      .def(py::init<>())
      .def(py::init<double, double, double>(), py::arg("x"), py::arg("y"), py::arg("z"))
      .def_readwrite("x", &Vec3::x)
      .def_readwrite("y", &Vec3::y)
      .def_readwrite("z", &Vec3::z)
      .def("norm", &Vec3::norm)
      .def("__repr__", [](const Vec3& v) {
        std::ostringstream s;
        s << "Vec3(" << v.x << ", " << v.y << ", " << v.z << ")";
        return s.str();
      });

  py::class_<AABB>(m, "AABB")
      .def(py::init<>())
      .def(py::init([](const Vec3& lo, const Vec3& hi) { return AABB{lo, hi}; }),
           py::arg("lo"), py::arg("hi"))
      .def_readwrite("lo", &AABB::lo)
      .def_readwrite("hi", &AABB::hi)
      .def("volume", &AABB::volume)
      .def("contains", &AABB::contains);

  py::enum_<CellState>(m, "CellState")
      .value("Free", CellState::Free)
      .value("Occupied", CellState::Occupied)
      .value("Unknown", CellState::Unknown);

  py::class_<Grid2D>(m, "Grid2D")
      .def(py::init([](int width, int height, int src_x, int src_y) {
             Grid2D g;
             g.width = width;
             g.height = height;
             g.src_x = src_x;
             g.src_y = src_y;
             g.cells.assign(static_cast<size_t>(width) * height, CellState::Unknown);
             return g;
           }),
           py::arg("width"), py::arg("height"), py::arg("src_x"), py::arg("src_y"))
      .def_readonly("width", &Grid2D::width)
      .def_readonly("height", &Grid2D::height)
      .def_readwrite("src_x", &Grid2D::src_x)
      .def_readwrite("src_y", &Grid2D::src_y)
      .def("at", &Grid2D::at)
      .def("set", &Grid2D::set);

  py::class_<OccupancyMap>(m, "OccupancyMap")
      .def(py::init<const AABB&, double>(), py::arg("bounds"), py::arg("resolution"))
      .def_property_readonly("resolution", &OccupancyMap::resolution)
      .def_property_readonly("nx", &OccupancyMap::nx)
      .def_property_readonly("ny", &OccupancyMap::ny)
      .def_property_readonly("nz", &OccupancyMap::nz)
      .def("state_at", &OccupancyMap::state_at)
      .def("integrate_scan",
           [](OccupancyMap& map, const Vec3& origin, const std::vector<Vec3>& hits,
              const std::vector<Vec3>& miss_dirs, double max_range) {
             map.integrate_scan(origin, hits, miss_dirs, max_range);
           },
           py::arg("origin"), py::arg("hits"), py::arg("miss_dirs"), py::arg("max_range"))
      .def("slice", &OccupancyMap::slice, py::arg("center"), py::arg("half_w"),
           py::arg("half_l"), py::arg("z"))
      .def("prism_free", &OccupancyMap::prism_free, py::arg("p"), py::arg("prism_dims"))
      .def("segment_free", &OccupancyMap::segment_free, py::arg("a"), py::arg("b"),
           py::arg("prism_dims"))
      .def("unknown_volume", py::overload_cast<>(&OccupancyMap::unknown_volume, py::const_))
      .def("unknown_volume",
           py::overload_cast<const AABB&>(&OccupancyMap::unknown_volume, py::const_))
      .def("to_snapshot", &OccupancyMap::to_snapshot)
      .def_static("from_snapshot", &OccupancyMap::from_snapshot);

  py::class_<VisibleSet>(m, "VisibleSet")
      .def_readonly("width", &VisibleSet::width)
      .def_readonly("height", &VisibleSet::height)
      .def_readonly("visible_unknown", &VisibleSet::visible_unknown)
      .def_readonly("visible_free", &VisibleSet::visible_free)
      .def_readonly("cell_reads", &VisibleSet::cell_reads)
      .def("is_visible", &VisibleSet::is_visible);

  m.def("rsc_visible", [](const Grid2D& g) { return rsc_visible(g); }, py::arg("grid"));
  m.def("raycast_visible", &raycast_visible, py::arg("grid"), py::arg("n_rays"),
        py::arg("range_cells"));
  m.def("los_oracle", &los_oracle, py::arg("grid"));
  m.def("default_ray_count", &default_ray_count, py::arg("grid"));
  m.def("ascii_dump", &ascii_dump, py::arg("grid"), py::arg("visible_set"));

  py::class_<EdgeGainParams>(m, "EdgeGainParams")
      .def(py::init<>())
      .def_readwrite("i_range", &EdgeGainParams::i_range)
      .def_readwrite("l_max", &EdgeGainParams::l_max)
      .def_readwrite("lambda_", &EdgeGainParams::lambda);

  py::class_<EdgeGain>(m, "EdgeGain")
      .def_readonly("edge_id", &EdgeGain::edge_id)
      .def_readonly("gain_m3", &EdgeGain::gain_m3)
      .def_readonly("fov_source_count", &EdgeGain::fov_source_count);

  m.def("fov_sources", &fov_sources, py::arg("n_prev"), py::arg("n_k"), py::arg("l_max"));
  m.def("edge_gain", &edge_gain, py::arg("map"), py::arg("n_prev"), py::arg("n_k"),
        py::arg("params"), py::arg("edge_id") = 0);
  m.def("node_gain", &node_gain, py::arg("i_prev"), py::arg("edge_gain_m3"),
        py::arg("dist"), py::arg("lambda_"));
  m.def("node_raycast_gain", &node_raycast_gain, py::arg("map"), py::arg("node"),
        py::arg("d_max"), py::arg("n_rays"));

  py::class_<State>(m, "State")
      .def(py::init<>())
      .def(py::init([](const Vec3& p, double yaw) { return State{p, yaw}; }),
           py::arg("p"), py::arg("yaw"))
      .def_readwrite("p", &State::p)
      .def_readwrite("yaw", &State::yaw);

  py::enum_<PlannerMode>(m, "PlannerMode")
      .value("RscCuboid", PlannerMode::RscCuboid)
      .value("RaycastBaseline", PlannerMode::RaycastBaseline);

  py::class_<PlannerParams>(m, "PlannerParams")
      .def(py::init<>())
      .def_readwrite("n_max", &PlannerParams::n_max)
      .def_readwrite("max_edge_len", &PlannerParams::max_edge_len)
      .def_readwrite("sampling_bounds", &PlannerParams::sampling_bounds)
      .def_readwrite("z_min", &PlannerParams::z_min)
      .def_readwrite("z_max", &PlannerParams::z_max)
      .def_readwrite("lambda_", &PlannerParams::lambda)
      .def_readwrite("i_range", &PlannerParams::i_range)
      .def_readwrite("l_max", &PlannerParams::l_max)
      .def_readwrite("prism", &PlannerParams::prism)
      .def_readwrite("mode", &PlannerParams::mode)
      .def_readwrite("d_max_planner", &PlannerParams::d_max_planner)
      .def_readwrite("rc_rays", &PlannerParams::rc_rays)
      .def_readwrite("attempt_factor", &PlannerParams::attempt_factor);

  py::class_<TreeNode>(m, "TreeNode")
      .def_readonly("id", &TreeNode::id)
      .def_readonly("pos", &TreeNode::pos)
      .def_readonly("parent", &TreeNode::parent)
      .def_readonly("node_gain", &TreeNode::node_gain)
      .def_readonly("edge_gain", &TreeNode::edge_gain)
      .def_readonly("edge_len", &TreeNode::edge_len);

  py::class_<Tree>(m, "Tree")
      .def_readonly("nodes", &Tree::nodes)
      .def("chain_to", &Tree::chain_to);

  py::class_<Path>(m, "Path")
      .def_readonly("node_ids", &Path::node_ids)
      .def_readonly("waypoints", &Path::waypoints)
      .def_readonly("total_gain", &Path::total_gain)
      .def_readonly("length", &Path::length);

  m.def("grow_tree",
        [](const OccupancyMap& map, const State& root, const PlannerParams& params,
           std::uint64_t seed) {
          std::mt19937_64 rng(seed);
          GrowStats stats;
          Tree tree = grow_tree(map, root, params, rng, &stats);
          return py::make_tuple(tree, stats.attempts, stats.accepted,
                                stats.budget_exhausted);
        },
        py::arg("map"), py::arg("root"), py::arg("params"), py::arg("seed"));
  m.def("best_path", &best_path, py::arg("tree"));
  m.def("assign_yaw",
        [](const std::vector<Vec3>& waypoints, double current_yaw) {
          return assign_yaw(waypoints, current_yaw);
        },
        py::arg("waypoints"), py::arg("current_yaw"));

  py::class_<SensorModel>(m, "SensorModel")
      .def(py::init<>())
      .def_readwrite("r_max", &SensorModel::r_max)
      .def_readwrite("alpha_h_deg", &SensorModel::alpha_h_deg)
      .def_readwrite("alpha_v_deg", &SensorModel::alpha_v_deg)
      .def_readwrite("n_h", &SensorModel::n_h)
      .def_readwrite("n_v", &SensorModel::n_v)
      .def_readwrite("mount_pitch", &SensorModel::mount_pitch);

  py::class_<Scan>(m, "Scan")
      .def_readonly("origin", &Scan::origin)
      .def_readonly("hits", &Scan::hits)
      .def_readonly("miss_dirs", &Scan::miss_dirs);

  py::class_<World>(m, "World")
      .def_readonly("bounds", &World::bounds)
      .def_readonly("obstacles", &World::obstacles)
      .def_readonly("start", &World::start)
      .def("point_in_obstacle", &World::point_in_obstacle)
      .def("prism_collides", &World::prism_collides);

  py::class_<LoadedScenario>(m, "LoadedScenario")
      .def_readonly("world", &LoadedScenario::world)
      .def_readonly("params", &LoadedScenario::params);

  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("make_world", &make_world, py::arg("bounds"), py::arg("obstacles"), py::arg("start"));
  m.def("scenario_to_text", &scenario_to_text, py::arg("world"), py::arg("params"));
  m.def("simulate_lidar", &simulate_lidar, py::arg("world"), py::arg("state"),
        py::arg("sensor"));
  m.def("reachable_free_volume", &reachable_free_volume, py::arg("world"), py::arg("r"),
        py::arg("prism_dims"));
  m.def("generate_maze", &generate_maze, py::arg("seed"), py::arg("cells_x"),
        py::arg("cells_y"), py::arg("cell_size"), py::arg("wall_thickness"),
        py::arg("height"), py::arg("braid") = 0.0);

  py::class_<RunConfig>(m, "RunConfig")
      .def(py::init<>())
      .def_readwrite("scenario", &RunConfig::scenario)
      .def_readwrite("resolution", &RunConfig::resolution)
      .def_readwrite("sensor", &RunConfig::sensor)
      .def_readwrite("v_max", &RunConfig::v_max)
      .def_readwrite("yaw_rate_max", &RunConfig::yaw_rate_max)
      .def_readwrite("lambda_", &RunConfig::lambda)
      .def_readwrite("i_range", &RunConfig::i_range)
      .def_readwrite("l_max", &RunConfig::l_max)
      .def_readwrite("n_max", &RunConfig::n_max)
      .def_readwrite("max_edge_len", &RunConfig::max_edge_len)
      .def_readwrite("g_zero", &RunConfig::g_zero)
      .def_readwrite("mode", &RunConfig::mode)
      .def_readwrite("recovery", &RunConfig::recovery)
      .def_readwrite("execute_full_path", &RunConfig::execute_full_path)
      .def_readwrite("d_max_planner", &RunConfig::d_max_planner)
      .def_readwrite("rc_rays", &RunConfig::rc_rays)
      .def_readwrite("z_min", &RunConfig::z_min)
      .def_readwrite("z_max", &RunConfig::z_max)
      .def_readwrite("prism", &RunConfig::prism)
      .def_readwrite("seed", &RunConfig::seed)
      .def_readwrite("max_sim_time", &RunConfig::max_sim_time)
      .def_readwrite("completion_fraction", &RunConfig::completion_fraction)
      .def_readwrite("k_low_gain", &RunConfig::k_low_gain)
      .def_readwrite("attempt_factor", &RunConfig::attempt_factor)
      .def_readwrite("trace_gains", &RunConfig::trace_gains);

  py::class_<IterationRecord>(m, "IterationRecord")
      .def_readonly("iter", &IterationRecord::iter)
      .def_readonly("t_c_ms", &IterationRecord::t_c_ms)
      .def_readonly("explored_m3", &IterationRecord::explored_m3)
      .def_readonly("state", &IterationRecord::state)
      .def_readonly("dead_end", &IterationRecord::dead_end)
      .def_readonly("motion_s", &IterationRecord::motion_s)
      .def_readonly("sim_s", &IterationRecord::sim_s);

  py::class_<ExplorationLog>(m, "ExplorationLog")
      .def_readonly("records", &ExplorationLog::records)
      .def_readonly("reachable_m3", &ExplorationLog::reachable_m3)
      .def_readonly("explored_m3", &ExplorationLog::explored_m3)
      .def_readonly("completion_pct", &ExplorationLog::completion_pct)
      .def_readonly("motion_s", &ExplorationLog::motion_s)
      .def_readonly("tc_total_s", &ExplorationLog::tc_total_s)
      .def_readonly("t_exp_s", &ExplorationLog::t_exp_s)
      .def_readonly("iterations", &ExplorationLog::iterations)
      .def_readonly("deadend_count", &ExplorationLog::deadend_count)
      .def_readonly("truncated", &ExplorationLog::truncated)
      .def_readonly("stalled", &ExplorationLog::stalled)
      .def_readonly("failed", &ExplorationLog::failed);

  m.def("apply_scenario_params", &apply_scenario_params, py::arg("config"),
        py::arg("params"));
  m.def("run_exploration",
        [](const World& world, const RunConfig& cfg) { return run_exploration(world, cfg); },
        py::arg("world"), py::arg("config"));
  m.def("run_exploration_scenario", &run_exploration_scenario, py::arg("config"));
  m.def("log_to_csv", &log_to_csv, py::arg("log"));
  m.def("log_summary", &log_summary, py::arg("log"));
  m.def("emit_volume_curve", &emit_volume_curve, py::arg("log"));
  m.def("gain_trace_csv", &gain_trace_csv, py::arg("log"));
  m.def("planner_trace_csv", &planner_trace_csv, py::arg("log"));

#ifdef NBVRSC_VERSION
  m.attr("__version__") = NBVRSC_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
