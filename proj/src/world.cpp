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

#include "nbv/world.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nbv {

bool World::point_in_obstacle(const Vec3& p) const {
  for (const AABB& b : obstacles) {
    if (b.contains(p)) return true;
  }
  return false;
}

bool World::prism_collides(const Vec3& p, const Vec3& prism_dims) const {
  const AABB prism = AABB::from_center(p, prism_dims);
  if (!bounds.contains_box(prism)) return true;
  for (const AABB& b : obstacles) {
    if (prism.overlaps(b)) return true;
  }
  return false;
}

World make_world(const AABB& bounds, std::vector<AABB> obstacles, const State& start) {
  const Vec3 e = bounds.extent();
  if (!(e.x > 0.0 && e.y > 0.0 && e.z > 0.0)) {
    throw std::runtime_error("world bounds are degenerate");
  }
  for (const AABB& b : obstacles) {
    if (!bounds.contains_box(b)) {
      throw std::runtime_error("obstacle extends outside world bounds");
    }
  }
  if (!bounds.contains(start.p)) {
    throw std::runtime_error("start pose outside world bounds");
  }
  World w{bounds, std::move(obstacles), start};
  if (w.point_in_obstacle(start.p)) {
    throw std::runtime_error("start pose inside an obstacle");
  }
  return w;
}

namespace {

[[noreturn]] void parse_fail(const std::string& name, int line, const std::string& what) {
  throw std::runtime_error(name + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

LoadedScenario parse_scenario(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  bool have_version = false;
  bool have_bounds = false;
  bool have_start = false;
  AABB bounds{};
  State start{};
  std::vector<AABB> obstacles;
  std::vector<int> obstacle_lines;
  std::map<std::string, double> params;

  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string key;
    if (!(ls >> key)) continue;

    if (!have_version) {
      int version = 0;
      if (key != "nbvworld" || !(ls >> version) || version != 1) {
        parse_fail(name, line_no, "expected header 'nbvworld 1'");
      }
      have_version = true;
      continue;
    }

    if (key == "bounds") {
      Vec3 size;
      if (!(ls >> size.x >> size.y >> size.z)) {
        parse_fail(name, line_no, "expected 3 numbers after 'bounds'");
      }
      bounds = {{0.0, 0.0, 0.0}, size};
      have_bounds = true;
    } else if (key == "start") {
      if (!(ls >> start.p.x >> start.p.y >> start.p.z >> start.yaw)) {
        parse_fail(name, line_no, "expected 4 numbers after 'start'");
      }
      start.yaw = wrap_angle(start.yaw);
      have_start = true;
    } else if (key == "box") {
      Vec3 c, s;
      if (!(ls >> c.x >> c.y >> c.z >> s.x >> s.y >> s.z)) {
        parse_fail(name, line_no, "expected 6 numbers after 'box'");
      }
      if (!(s.x > 0.0 && s.y > 0.0 && s.z > 0.0)) {
        parse_fail(name, line_no, "box size must be positive");
      }
      obstacles.push_back(AABB::from_center(c, s));
      obstacle_lines.push_back(line_no);
    } else {
      double v = 0.0;
      if (!(ls >> v)) {
        parse_fail(name, line_no, "expected a numeric value after '" + key + "'");
      }
      std::string extra;
      if (ls >> extra) {
        parse_fail(name, line_no, "unexpected trailing token '" + extra + "'");
      }
      params[key] = v;
    }
  }

  if (!have_version) parse_fail(name, line_no, "missing 'nbvworld 1' header");
  if (!have_bounds) parse_fail(name, line_no, "missing 'bounds' record");
  if (!have_start) parse_fail(name, line_no, "missing 'start' record");

  for (size_t i = 0; i < obstacles.size(); ++i) {
    if (!bounds.contains_box(obstacles[i])) {
      parse_fail(name, obstacle_lines[i], "obstacle extends outside world bounds");
    }
  }

  LoadedScenario sc;
  sc.world = make_world(bounds, std::move(obstacles), start);
  sc.params = std::move(params);
  return sc;
}

LoadedScenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open scenario file: " + path);
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_scenario(buf.str(), path);
}

std::string scenario_to_text(const World& world,
                             const std::map<std::string, double>& params) {
  std::ostringstream out;
  char buf[256];
  out << "nbvworld 1\n";
  const Vec3 e = world.bounds.extent();
  std::snprintf(buf, sizeof buf, "bounds %.10g %.10g %.10g\n", e.x, e.y, e.z);
  out << buf;
  std::snprintf(buf, sizeof buf, "start %.10g %.10g %.10g %.10g\n", world.start.p.x,
                world.start.p.y, world.start.p.z, world.start.yaw);
  out << buf;
  for (const auto& [k, v] : params) {
    std::snprintf(buf, sizeof buf, "%s %.10g\n", k.c_str(), v);
    out << buf;
  }
  for (const AABB& b : world.obstacles) {
    const Vec3 c = b.center();
    const Vec3 s = b.extent();
    std::snprintf(buf, sizeof buf, "box %.10g %.10g %.10g %.10g %.10g %.10g\n", c.x,
                  c.y, c.z, s.x, s.y, s.z);
    out << buf;
  }
  return out.str();
}

Scan simulate_lidar(const World& world, const State& state, const SensorModel& sensor) {
  if (!world.bounds.contains(state.p)) {
    throw std::invalid_argument("simulate_lidar: pose outside world bounds");
  }
  if (world.point_in_obstacle(state.p)) {
    throw std::invalid_argument("simulate_lidar: pose inside an obstacle");
  }

  const double deg = M_PI / 180.0;
  const double alpha_h = sensor.alpha_h_deg * deg;
  const double alpha_v = sensor.alpha_v_deg * deg;
  const bool full_circle = sensor.alpha_h_deg >= 360.0 - 1e-9;

  Scan scan;
  scan.origin = state.p;
  scan.hits.reserve(static_cast<size_t>(sensor.n_h) * sensor.n_v);

  for (int i = 0; i < sensor.n_v; ++i) {
    const double phi =
        sensor.mount_pitch +
        (sensor.n_v == 1 ? 0.0 : -alpha_v / 2.0 + alpha_v * i / (sensor.n_v - 1));
    const double cp = std::cos(phi);
    const double sp = std::sin(phi);
    for (int j = 0; j < sensor.n_h; ++j) {
      const double theta =
          state.yaw + (full_circle
                           ? 2.0 * M_PI * j / sensor.n_h
                           : (sensor.n_h == 1 ? 0.0
                                              : -alpha_h / 2.0 + alpha_h * j / (sensor.n_h - 1)));
      const Vec3 dir{cp * std::cos(theta), cp * std::sin(theta), sp};
      double best = std::numeric_limits<double>::infinity();
      for (const AABB& box : world.obstacles) {
        const auto t = ray_box_hit(state.p, dir, box);
        if (t && *t < best) best = *t;
      }
      if (best <= sensor.r_max) {
        scan.hits.push_back(state.p + dir * best);
      } else {
        scan.miss_dirs.push_back(dir);
      }
    }
  }
  return scan;
}

ReachableSet compute_reachable(const World& world, double r, const Vec3& prism_dims) {
  // Same quantization as OccupancyMap over these bounds.
  const Vec3 e = world.bounds.extent();
  const int nx = static_cast<int>(std::ceil(e.x / r - 1e-7));
  const int ny = static_cast<int>(std::ceil(e.y / r - 1e-7));
  const int nz = static_cast<int>(std::ceil(e.z / r - 1e-7));
  auto center = [&](int x, int y, int z) {
    return Vec3{world.bounds.lo.x + (x + 0.5) * r, world.bounds.lo.y + (y + 0.5) * r,
                world.bounds.lo.z + (z + 0.5) * r};
  };
  auto passable = [&](int x, int y, int z) {
    return !world.prism_collides(center(x, y, z), prism_dims);
  };
  auto lin = [&](int x, int y, int z) {
    return (static_cast<std::int64_t>(z) * ny + y) * nx + x;
  };

  const Vec3 s = world.start.p;
  int sx = std::clamp(static_cast<int>(std::floor((s.x - world.bounds.lo.x) / r)), 0, nx - 1);
  int sy = std::clamp(static_cast<int>(std::floor((s.y - world.bounds.lo.y) / r)), 0, ny - 1);
  int sz = std::clamp(static_cast<int>(std::floor((s.z - world.bounds.lo.z) / r)), 0, nz - 1);

  ReachableSet out;
  // Seed at the start voxel, or the nearest passable voxel in its vicinity.
  int seed[3] = {sx, sy, sz};
  if (!passable(sx, sy, sz)) {
    bool found = false;
    for (int dz = -1; dz <= 1 && !found; ++dz) {
      for (int dy = -1; dy <= 1 && !found; ++dy) {
        for (int dx = -1; dx <= 1 && !found; ++dx) {
          const int x = sx + dx, y = sy + dy, z = sz + dz;
          if (x < 0 || x >= nx || y < 0 || y >= ny || z < 0 || z >= nz) continue;
          if (passable(x, y, z)) {
            seed[0] = x;
            seed[1] = y;
            seed[2] = z;
            found = true;
          }
        }
      }
    }
    if (!found) return out;
  }

  std::vector<std::uint8_t> seen(static_cast<size_t>(nx) * ny * nz, 0);
  std::deque<std::array<int, 3>> queue;
  queue.push_back({seed[0], seed[1], seed[2]});
  seen[lin(seed[0], seed[1], seed[2])] = 1;
  const int steps[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
  while (!queue.empty()) {
    const auto [x, y, z] = queue.front();
    queue.pop_front();
    out.voxel_ids.push_back(lin(x, y, z));
    for (const auto& st : steps) {
      const int u = x + st[0], v = y + st[1], w = z + st[2];
      if (u < 0 || u >= nx || v < 0 || v >= ny || w < 0 || w >= nz) continue;
      if (seen[lin(u, v, w)]) continue;
      if (!passable(u, v, w)) continue;
      seen[lin(u, v, w)] = 1;
      queue.push_back({u, v, w});
    }
  }
  std::sort(out.voxel_ids.begin(), out.voxel_ids.end());
  out.volume_m3 = static_cast<double>(out.voxel_ids.size()) * r * r * r;
  return out;
}

double reachable_free_volume(const World& world, double r, const Vec3& prism_dims) {
  return compute_reachable(world, r, prism_dims).volume_m3;
}

World generate_maze(std::uint64_t seed, int cells_x, int cells_y, double cell_size,
                    double wall_thickness, double height, double braid) {
  if (cells_x < 2 || cells_y < 2) throw std::invalid_argument("maze needs >= 2x2 cells");
  if (!(cell_size > wall_thickness && wall_thickness > 0.0)) {
    throw std::invalid_argument("maze cell size must exceed wall thickness");
  }

  std::mt19937_64 rng(seed);
  auto cell_id = [&](int x, int y) { return y * cells_x + x; };
  std::vector<std::uint8_t> visited(static_cast<size_t>(cells_x) * cells_y, 0);
  std::set<std::pair<int, int>> passages;  // (low cell id, high cell id)

  // Recursive backtracker.
  std::vector<std::pair<int, int>> stack{{0, 0}};
  visited[0] = 1;
  const int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  while (!stack.empty()) {
    const auto [cx, cy] = stack.back();
    int order[4] = {0, 1, 2, 3};
    for (int i = 3; i > 0; --i) std::swap(order[i], order[rng() % (i + 1)]);
    bool advanced = false;
    for (int k = 0; k < 4 && !advanced; ++k) {
      const int nx = cx + dirs[order[k]][0];
      const int ny = cy + dirs[order[k]][1];
      if (nx < 0 || nx >= cells_x || ny < 0 || ny >= cells_y) continue;
      if (visited[cell_id(nx, ny)]) continue;
      visited[cell_id(nx, ny)] = 1;
      passages.insert({std::min(cell_id(cx, cy), cell_id(nx, ny)),
                       std::max(cell_id(cx, cy), cell_id(nx, ny))});
      stack.push_back({nx, ny});
      advanced = true;
    }
    if (!advanced) stack.pop_back();
  }

  // Braid pass: open a fraction of the remaining interior walls to create
  // loops (published maze benchmarks are loopy, not trees).
  if (braid > 0.0) {
    for (int y = 0; y < cells_y; ++y) {
      for (int x = 0; x < cells_x; ++x) {
        for (const auto& d : {std::pair{1, 0}, std::pair{0, 1}}) {
          const int nx2 = x + d.first, ny2 = y + d.second;
          if (nx2 >= cells_x || ny2 >= cells_y) continue;
          const auto key = std::pair{std::min(cell_id(x, y), cell_id(nx2, ny2)),
                                     std::max(cell_id(x, y), cell_id(nx2, ny2))};
          if (passages.count(key)) continue;
          const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
          if (u < braid) passages.insert(key);
        }
      }
    }
  }

  auto has_passage = [&](int ax, int ay, int bx, int by) {
    return passages.count({std::min(cell_id(ax, ay), cell_id(bx, by)),
                           std::max(cell_id(ax, ay), cell_id(bx, by))}) > 0;
  };

  const AABB bounds{{0.0, 0.0, 0.0},
                    {cells_x * cell_size, cells_y * cell_size, height}};
  std::vector<AABB> walls;
  const double half_t = wall_thickness / 2.0;

  // Vertical walls between x-neighbours, merged along y.
  for (int x = 0; x + 1 < cells_x; ++x) {
    const double wx = (x + 1) * cell_size;
    int y = 0;
    while (y < cells_y) {
      if (has_passage(x, y, x + 1, y)) {
        ++y;
        continue;
      }
      int y_end = y;
      while (y_end + 1 < cells_y && !has_passage(x, y_end + 1, x + 1, y_end + 1)) ++y_end;
      const double y0 = std::max(0.0, y * cell_size - half_t);
      const double y1 = std::min(bounds.hi.y, (y_end + 1) * cell_size + half_t);
      walls.push_back({{wx - half_t, y0, 0.0}, {wx + half_t, y1, height}});
      y = y_end + 1;
    }
  }
  // Horizontal walls between y-neighbours, merged along x.
  for (int y = 0; y + 1 < cells_y; ++y) {
    const double wy = (y + 1) * cell_size;
    int x = 0;
    while (x < cells_x) {
      if (has_passage(x, y, x, y + 1)) {
        ++x;
        continue;
      }
      int x_end = x;
      while (x_end + 1 < cells_x && !has_passage(x_end + 1, y, x_end + 1, y + 1)) ++x_end;
      const double x0 = std::max(0.0, x * cell_size - half_t);
      const double x1 = std::min(bounds.hi.x, (x_end + 1) * cell_size + half_t);
      walls.push_back({{x0, wy - half_t, 0.0}, {x1, wy + half_t, height}});
      x = x_end + 1;
    }
  }

  const State start{{cell_size / 2.0, cell_size / 2.0, height / 2.0}, 0.0};
  return make_world(bounds, std::move(walls), start);
}

}  // namespace nbv
