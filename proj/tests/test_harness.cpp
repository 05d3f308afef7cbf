#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "nbv/benchmark.hpp"
#include "support.hpp"

using namespace nbv;

TEST_SUITE_BEGIN("harness");

TEST_CASE("mean/std agree with a streaming reference") {
  std::mt19937_64 rng(4);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> xs;
    const int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) xs.push_back(unit() * 100.0);

    // Welford's streaming moments as the independent reference.
    double mean = 0.0, m2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = xs[i] - mean;
      mean += d / (i + 1);
      m2 += d * (xs[i] - mean);
    }
    const double stddev = std::sqrt(m2 / n);

    const auto [m, s] = mean_std(xs);
    CHECK(m == doctest::Approx(mean).epsilon(1e-9));
    CHECK(s == doctest::Approx(stddev).epsilon(1e-9));
  }
  CHECK(mean_std({42.0}).second == 0.0);
}

TEST_CASE("volume curve is monotone and ends at the final volume") {
  const LoadedScenario sc = load_scenario(test::scenario_dir() + "/empty_room.world");
  RunConfig cfg;
  cfg.scenario = "empty_room";
  apply_scenario_params(cfg, sc.params);
  const ExplorationLog log = run_exploration(sc.world, cfg);
  const std::string curve = emit_volume_curve(log);

  std::istringstream in(curve);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# nbvcurve 1");
  std::getline(in, line);  // header row (no truncation flag expected)
  CHECK(line == "t_s,explored_m3");
  double prev = -1.0, last = -1.0;
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    const double v = std::stod(line.substr(comma + 1));
    CHECK(v >= prev - 1e-9);
    prev = v;
    last = v;
  }
  CHECK(last == doctest::Approx(log.explored_m3).epsilon(1e-9));

  RunConfig capped = cfg;
  capped.max_sim_time = 1.0;
  const ExplorationLog trunc = run_exploration(sc.world, capped);
  CHECK(emit_volume_curve(trunc).find("# truncated 1") != std::string::npos);
}

TEST_CASE("benchmark aggregates runs per mode") {
  BenchmarkSpec spec;
  spec.rows.push_back({test::scenario_dir() + "/empty_room.world", 0.0,
                       PlannerMode::RscCuboid});
  spec.rows.push_back({test::scenario_dir() + "/empty_room.world", 0.0,
                       PlannerMode::RaycastBaseline});
  spec.seeds = {1, 2};
  spec.base.max_sim_time = 120.0;

  const BenchmarkResult result = run_benchmark(spec);
  REQUIRE(result.rows.size() == 2u);
  CHECK(result.rows[0].mode == std::string("rsc-cuboid"));
  CHECK(result.rows[1].mode == std::string("raycast-baseline"));
  CHECK(result.rows[0].runs == 2);
  CHECK_FALSE(result.any_failed);

  // Aggregates match a manual recomputation from the retained logs.
  std::vector<double> texp;
  for (const ExplorationLog& log : result.logs) {
    if (log.mode == PlannerMode::RscCuboid) texp.push_back(log.t_exp_s);
  }
  REQUIRE(texp.size() == 2u);
  const auto [m, s] = mean_std(texp);
  CHECK(result.rows[0].texp_mean_s == doctest::Approx(m).epsilon(1e-9));
  CHECK(result.rows[0].texp_std_s == doctest::Approx(s).epsilon(1e-9));

  const std::string csv = summary_csv(result.rows);
  CHECK(csv.rfind("scenario,r,mode,runs,tc_mean_ms,tc_std_ms,texp_mean_s,texp_std_s,"
                  "completion_pct,deadends\n",
                  0) == 0);
}

TEST_CASE("single-run spec has zero stddev") {
  BenchmarkSpec spec;
  spec.rows.push_back({test::scenario_dir() + "/empty_room.world", 0.0,
                       PlannerMode::RscCuboid});
  spec.seeds = {9};
  const BenchmarkResult result = run_benchmark(spec);
  REQUIRE(result.rows.size() == 1u);
  CHECK(result.rows[0].runs == 1);
  CHECK(result.rows[0].tc_std_ms == 0.0);
  CHECK(result.rows[0].texp_std_s == 0.0);
}

TEST_CASE("failing scenario path flags the row") {
  BenchmarkSpec spec;
  spec.rows.push_back({"/nonexistent/world.file", 0.0, PlannerMode::RscCuboid});
  spec.seeds = {1};
  const BenchmarkResult result = run_benchmark(spec);
  CHECK(result.any_failed);
  REQUIRE(result.rows.size() == 1u);
  CHECK(result.rows[0].any_failed);
  CHECK(result.rows[0].runs == 0);
}

TEST_CASE("duplicate seeds are rejected") {
  BenchmarkSpec spec;
  spec.rows.push_back({test::scenario_dir() + "/empty_room.world", 0.0,
                       PlannerMode::RscCuboid});
  spec.seeds = {3, 3};
  CHECK_THROWS_AS(run_benchmark(spec), std::invalid_argument);
}

TEST_CASE("re-running a spec reproduces per-run logs modulo wall-clock time") {
  BenchmarkSpec spec;
  spec.rows.push_back({test::scenario_dir() + "/empty_room.world", 0.0,
                       PlannerMode::RscCuboid});
  spec.seeds = {4, 5};
  const BenchmarkResult a = run_benchmark(spec);
  const BenchmarkResult b = run_benchmark(spec);
  REQUIRE(a.logs.size() == b.logs.size());
  for (size_t i = 0; i < a.logs.size(); ++i) {
    REQUIRE(a.logs[i].records.size() == b.logs[i].records.size());
    for (size_t k = 0; k < a.logs[i].records.size(); ++k) {
      CHECK(a.logs[i].records[k].state.p == b.logs[i].records[k].state.p);
      CHECK(a.logs[i].records[k].explored_m3 == b.logs[i].records[k].explored_m3);
    }
  }
}

TEST_SUITE_END();
