#include <doctest.h>

#include <random>

#include "nbv/grid_map.hpp"
#include "support.hpp"

using namespace nbv;

TEST_SUITE_BEGIN("grid_map");

TEST_CASE("new map dimensions and initial state") {
  const OccupancyMap map({{0, 0, 0}, {10, 20, 3}}, 0.4);
  CHECK(map.nx() == 25);
  CHECK(map.ny() == 50);
  CHECK(map.nz() == 8);
  CHECK(*map.state_at({5.0, 10.0, 1.5}) == CellState::Unknown);
  CHECK(map.unknown_volume() == doctest::Approx(25 * 50 * 8 * 0.064).epsilon(1e-12));

  const OccupancyMap one({{0, 0, 0}, {1, 1, 1}}, 1.0);
  CHECK(one.cell_count() == 1);
  CHECK(*one.state_at({0.5, 0.5, 0.5}) == CellState::Unknown);

  const OccupancyMap eight({{0, 0, 0}, {2, 2, 2}}, 0.5);
  CHECK(eight.cell_count() == 64);
  CHECK(eight.unknown_volume() == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("new map rejects bad arguments") {
  CHECK_THROWS_AS(OccupancyMap({{0, 0, 0}, {1, 1, 1}}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(OccupancyMap({{0, 0, 0}, {1, 1, 1}}, -0.5), std::invalid_argument);
  CHECK_THROWS_AS(OccupancyMap({{0, 0, 0}, {0.3, 1, 1}}, 0.5), std::invalid_argument);
}

namespace {

int count_state(const OccupancyMap& map, CellState s) {
  int n = 0;
  for (int z = 0; z < map.nz(); ++z)
    for (int y = 0; y < map.ny(); ++y)
      for (int x = 0; x < map.nx(); ++x)
        if (map.state({x, y, z}) == s) ++n;
  return n;
}

}  // namespace

TEST_CASE("integrate marks ray voxels free and endpoint occupied") {
  OccupancyMap map({{0, 0, 0}, {5, 1, 1}}, 0.5);
  const Vec3 origin{0.25, 0.25, 0.25};
  const Vec3 hit{2.25, 0.25, 0.25};
  map.integrate_scan(origin, std::vector<Vec3>{hit}, {}, 20.0);
  CHECK(count_state(map, CellState::Free) == 4);
  CHECK(count_state(map, CellState::Occupied) == 1);
  CHECK(*map.state_at(hit) == CellState::Occupied);
  CHECK(*map.state_at(origin) == CellState::Free);
}

TEST_CASE("miss ray clears free up to max range") {
  OccupancyMap map({{0, 0, 0}, {5, 1, 1}}, 0.5);
  map.integrate_scan({0.25, 0.25, 0.25}, {}, std::vector<Vec3>{{1, 0, 0}}, 10.0);
  CHECK(count_state(map, CellState::Occupied) == 0);
  CHECK(count_state(map, CellState::Free) == 10);  // clipped at the map border
}

TEST_CASE("occupied latches over free within one scan, both ray orders") {
  for (const bool hit_first : {true, false}) {
    OccupancyMap map({{0, 0, 0}, {5, 1, 1}}, 0.5);
    const Vec3 origin{0.25, 0.25, 0.25};
    const Vec3 near_hit{1.25, 0.25, 0.25};  // endpoint in voxel ix=2
    const Vec3 far_hit{2.25, 0.25, 0.25};   // passes through voxel ix=2
    std::vector<Vec3> hits = hit_first ? std::vector<Vec3>{near_hit, far_hit}
                                       : std::vector<Vec3>{far_hit, near_hit};
    map.integrate_scan(origin, hits, {}, 20.0);
    CHECK(*map.state_at(near_hit) == CellState::Occupied);
    CHECK(*map.state_at(far_hit) == CellState::Occupied);
  }
}

TEST_CASE("integrate rejects origin outside bounds") {
  OccupancyMap map({{0, 0, 0}, {2, 2, 2}}, 0.5);
  CHECK_THROWS_AS(map.integrate_scan({-1, 0, 0}, {}, {}, 1.0), std::invalid_argument);
}

TEST_CASE("state_at basics") {
  OccupancyMap map({{0, 0, 0}, {2, 2, 2}}, 0.5);
  CHECK(*map.state_at({1.0, 1.0, 1.0}) == CellState::Unknown);
  CHECK(!map.state_at({3.0, 0.0, 0.0}).has_value());
  map.integrate_scan({0.25, 0.25, 0.25}, std::vector<Vec3>{{1.25, 0.25, 0.25}}, {}, 5.0);
  CHECK(*map.state_at({1.25, 0.25, 0.25}) == CellState::Occupied);
}

TEST_CASE("slice covers a full layer and clips at borders") {
  OccupancyMap map({{0, 0, 0}, {2, 2, 1}}, 0.5);
  const Grid2D full = map.slice({1.0, 1.0, 0.25}, 2.0, 2.0, 0.25);
  CHECK(full.width == 4);
  CHECK(full.height == 4);

  const Grid2D clipped = map.slice({0.25, 0.25, 0.25}, 1.0, 1.0, 0.25);
  CHECK(clipped.width == 3);  // columns with centers in [-0.75, 1.25]
  CHECK(clipped.in_bounds(clipped.src_x, clipped.src_y));
  CHECK(clipped.src_x == 0);

  CHECK_THROWS_AS(map.slice({1, 1, 0.25}, 1, 1, 5.0), std::invalid_argument);
}

TEST_CASE("slice half-width quantization matches center enumeration") {
  OccupancyMap map({{0, 0, 0}, {20, 20, 1}}, 0.2);
  const Grid2D g = map.slice({10.0, 10.0, 0.5}, 5.0, 5.0, 0.5);
  int expect_cols = 0;
  for (int i = 0; i < map.nx(); ++i) {
    const double c = 0.1 + 0.2 * i;
    if (c >= 5.0 - 1e-9 && c <= 15.0 + 1e-9) ++expect_cols;
  }
  CHECK(expect_cols == 50);
  CHECK(g.width == expect_cols);
  CHECK(g.height == expect_cols);
}

TEST_CASE("prism_free semantics") {
  OccupancyMap map({{0, 0, 0}, {4, 4, 2}}, 0.2);
  const Vec3 prism{0.6, 0.6, 0.5};
  CHECK_FALSE(map.prism_free({2, 2, 1}, prism));  // fresh map: unknown blocks
  test::fill_state(map, CellState::Free);
  CHECK(map.prism_free({2, 2, 1}, prism));
  // One occupied voxel at the prism corner.
  const auto corner = map.voxel_of({2 - 0.29, 2 - 0.29, 1 - 0.24});
  map.set_state(*corner, CellState::Occupied);
  CHECK_FALSE(map.prism_free({2, 2, 1}, prism));
  // Outside the map is not free.
  CHECK_FALSE(map.prism_free({0.1, 2, 1}, prism));
}

TEST_CASE("prism_free matches brute-force voxel overlap enumeration") {
  std::mt19937_64 rng(7);
  OccupancyMap map({{0, 0, 0}, {4, 4, 2}}, 0.25);
  for (int z = 0; z < map.nz(); ++z)
    for (int y = 0; y < map.ny(); ++y)
      for (int x = 0; x < map.nx(); ++x)
        map.set_state({x, y, z}, (rng() % 10 == 0) ? CellState::Occupied : CellState::Free);

  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const Vec3 prism{0.6, 0.6, 0.5};
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 p{0.4 + unit() * 3.2, 0.4 + unit() * 3.2, 0.3 + unit() * 1.4};
    const AABB box = AABB::from_center(p, prism);
    bool expect = true;
    for (int z = 0; z < map.nz() && expect; ++z) {
      for (int y = 0; y < map.ny() && expect; ++y) {
        for (int x = 0; x < map.nx() && expect; ++x) {
          const Vec3 c = map.center_of({x, y, z});
          const double h = map.resolution() / 2;
          const AABB voxel{{c.x - h, c.y - h, c.z - h}, {c.x + h, c.y + h, c.z + h}};
          if (voxel.overlaps(box) && map.state({x, y, z}) != CellState::Free) expect = false;
        }
      }
    }
    CHECK(map.prism_free(p, prism) == expect);
  }
}

TEST_CASE("segment_free degenerate, wall crossing, exact-width corridor") {
  const Vec3 prism{0.6, 0.6, 0.5};
  OccupancyMap map({{0, 0, 0}, {6, 2, 2}}, 0.2);
  test::fill_state(map, CellState::Free);

  CHECK(map.segment_free({1, 1, 1}, {1, 1, 1}, prism) == map.prism_free({1, 1, 1}, prism));

  // Wall across the corridor at x = 3.
  for (int z = 0; z < map.nz(); ++z)
    for (int y = 0; y < map.ny(); ++y) map.set_state({15, y, z}, CellState::Occupied);
  CHECK_FALSE(map.segment_free({1, 1, 1}, {5, 1, 1}, prism));

  // Corridor exactly prism-wide: walls at y<0.7 and y>1.3 leave 0.6 m.
  OccupancyMap corridor({{0, 0, 0}, {6, 2, 2}}, 0.1);
  test::fill_state(corridor, CellState::Free);
  for (int z = 0; z < corridor.nz(); ++z) {
    for (int x = 0; x < corridor.nx(); ++x) {
      for (int y = 0; y < corridor.ny(); ++y) {
        const double cy = 0.05 + 0.1 * y;
        if (cy < 0.7 || cy > 1.3) corridor.set_state({x, y, z}, CellState::Occupied);
      }
    }
  }
  CHECK(corridor.segment_free({0.5, 1.0, 1.0}, {5.5, 1.0, 1.0}, prism));
  // Exhaustive sampling at r/10 agrees.
  bool fine_ok = true;
  for (double t = 0.0; t <= 1.0; t += 0.01 / 5.0) {
    if (!corridor.prism_free({0.5 + 5.0 * t, 1.0, 1.0}, prism)) fine_ok = false;
  }
  CHECK(fine_ok);
}

TEST_CASE("unknown_volume: fresh, explored, half-cleared") {
  OccupancyMap map({{0, 0, 0}, {2, 2, 2}}, 0.25);
  CHECK(map.unknown_volume() == doctest::Approx(8.0));
  test::fill_state(map, CellState::Free);
  CHECK(map.unknown_volume() == 0.0);

  OccupancyMap half({{0, 0, 0}, {2, 2, 2}}, 0.25);
  for (int z = 0; z < half.nz(); ++z)
    for (int y = 0; y < half.ny(); ++y)
      for (int x = 0; x < half.nx() / 2; ++x) half.set_state({x, y, z}, CellState::Free);
  std::int64_t direct = 0;
  for (int z = 0; z < half.nz(); ++z)
    for (int y = 0; y < half.ny(); ++y)
      for (int x = 0; x < half.nx(); ++x)
        if (half.state({x, y, z}) == CellState::Unknown) ++direct;
  CHECK(half.unknown_volume() ==
        doctest::Approx(static_cast<double>(direct) * 0.25 * 0.25 * 0.25).epsilon(1e-12));
  CHECK(half.unknown_volume() == doctest::Approx(4.0));
}

TEST_CASE("monotone discovery and idempotent integration") {
  std::mt19937_64 rng(21);
  OccupancyMap map({{0, 0, 0}, {4, 4, 2}}, 0.25);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  double prev_unknown = map.unknown_volume();
  for (int s = 0; s < 10; ++s) {
    const Vec3 origin{0.5 + unit() * 3.0, 0.5 + unit() * 3.0, 0.5 + unit()};
    std::vector<Vec3> hits, misses;
    for (int k = 0; k < 30; ++k) {
      const double th = unit() * 2 * M_PI;
      const Vec3 dir{std::cos(th), std::sin(th), unit() - 0.5};
      if (k % 3 == 0) hits.push_back(origin + dir.normalized() * (0.5 + unit() * 2.0));
      else misses.push_back(dir.normalized());
    }
    map.integrate_scan(origin, hits, misses, 5.0);
    const double unknown = map.unknown_volume();
    CHECK(unknown <= prev_unknown + 1e-12);
    prev_unknown = unknown;

    const std::string before = map.to_snapshot();
    map.integrate_scan(origin, hits, misses, 5.0);
    CHECK(map.to_snapshot() == before);  // idempotent
  }
}

TEST_CASE("snapshot round-trip and stability") {
  std::mt19937_64 rng(5);
  OccupancyMap map({{0, 0, 0}, {3, 2, 1}}, 0.25);
  for (int z = 0; z < map.nz(); ++z)
    for (int y = 0; y < map.ny(); ++y)
      for (int x = 0; x < map.nx(); ++x)
        map.set_state({x, y, z}, static_cast<CellState>(rng() % 3));

  const std::string snap = map.to_snapshot();
  CHECK(snap == map.to_snapshot());
  const OccupancyMap loaded = OccupancyMap::from_snapshot(snap);
  CHECK(loaded.to_snapshot() == snap);
  CHECK(loaded.nx() == map.nx());
  for (int z = 0; z < map.nz(); ++z)
    for (int y = 0; y < map.ny(); ++y)
      for (int x = 0; x < map.nx(); ++x)
        REQUIRE(loaded.state({x, y, z}) == map.state({x, y, z}));

  CHECK_THROWS(OccupancyMap::from_snapshot("bogus"));
}

TEST_SUITE_END();
