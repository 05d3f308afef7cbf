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

#include "nbv/benchmark.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nbv {

std::pair<double, double> mean_std(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / values.size();
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= values.size();
  return {mean, std::sqrt(var)};
}

std::string emit_volume_curve(const ExplorationLog& log) {
  if (log.records.empty()) throw std::invalid_argument("emit_volume_curve: empty log");
  std::ostringstream out;
  out << "# nbvcurve 1\n";
  if (log.truncated) out << "# truncated 1\n";
  out << "t_s,explored_m3\n";
  char buf[80];
  for (const IterationRecord& r : log.records) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", r.sim_s, r.explored_m3);
    out << buf;
  }
  return out.str();
}

namespace {

double mean_tc_ms(const ExplorationLog& log) {
  // Iteration 0 is the initial sweep (no planning); exclude it.
  std::vector<double> tc;
  for (const IterationRecord& r : log.records) {
    if (r.iter > 0) tc.push_back(r.t_c_ms);
  }
  return mean_std(tc).first;
}

std::string run_file_stem(const BenchRow& row, double resolution, std::uint64_t seed) {
  std::string scenario = std::filesystem::path(row.scenario_path).stem().string();
  char buf[64];
  std::snprintf(buf, sizeof buf, "_r%g_%s_seed%llu", resolution,
                mode_name(row.mode), static_cast<unsigned long long>(seed));
  return scenario + buf;
}

}  // namespace

BenchmarkResult run_benchmark(const BenchmarkSpec& spec) {
  if (spec.rows.empty() || spec.seeds.empty()) {
    throw std::invalid_argument("benchmark spec needs at least one row and one seed");
  }
  for (size_t i = 0; i < spec.seeds.size(); ++i) {
    for (size_t j = i + 1; j < spec.seeds.size(); ++j) {
      if (spec.seeds[i] == spec.seeds[j]) {
        throw std::invalid_argument("benchmark seeds must be distinct");
      }
    }
  }
  const bool write = !spec.out_dir.empty();
  if (write) std::filesystem::create_directories(spec.out_dir);

  BenchmarkResult result;
  for (const BenchRow& row : spec.rows) {
    std::vector<double> tcs, texps, completions, deadends;
    bool row_failed = false;
    double resolution_used = row.resolution;

    LoadedScenario sc;
    bool scenario_ok = true;
    try {
      sc = load_scenario(row.scenario_path);
    } catch (const std::exception& e) {
      scenario_ok = false;
      row_failed = true;
      result.any_failed = true;
      std::fprintf(stderr, "scenario failed (%s): %s\n", row.scenario_path.c_str(),
                   e.what());
    }

    for (size_t si = 0; scenario_ok && si < spec.seeds.size(); ++si) {
      const std::uint64_t seed = spec.seeds[si];
      RunConfig cfg = spec.base;
      cfg.scenario = row.scenario_path;
      apply_scenario_params(cfg, sc.params);
      if (row.resolution > 0.0) cfg.resolution = row.resolution;
      cfg.mode = row.mode;
      if (row.mode == PlannerMode::RaycastBaseline) {
        cfg.recovery = false;
        cfg.execute_full_path = false;
      }
      cfg.seed = seed;
      resolution_used = cfg.resolution;

      ExplorationLog log;
      try {
        log = run_exploration(sc.world, cfg);
      } catch (const std::exception& e) {
        row_failed = true;
        result.any_failed = true;
        std::fprintf(stderr, "run failed (%s seed %llu): %s\n",
                     row.scenario_path.c_str(), static_cast<unsigned long long>(seed),
                     e.what());
        continue;
      }
      if (log.failed) {
        row_failed = true;
        result.any_failed = true;
      } else {
        tcs.push_back(mean_tc_ms(log));
        texps.push_back(log.t_exp_s);
        completions.push_back(log.completion_pct);
        deadends.push_back(static_cast<double>(log.deadend_count));
      }
      if (write) {
        const std::string stem = run_file_stem(row, cfg.resolution, seed);
        std::ofstream(spec.out_dir + "/" + stem + ".csv") << log_to_csv(log);
        std::ofstream(spec.out_dir + "/" + stem + ".curve.csv") << emit_volume_curve(log);
        std::ofstream(spec.out_dir + "/" + stem + ".summary.txt") << log_summary(log);
      }
      result.logs.push_back(std::move(log));
    }

    SummaryRow srow;
    srow.scenario = std::filesystem::path(row.scenario_path).stem().string();
    srow.resolution = resolution_used;
    srow.mode = mode_name(row.mode);
    srow.runs = static_cast<int>(tcs.size());
    const auto [tc_m, tc_s] = mean_std(tcs);
    const auto [te_m, te_s] = mean_std(texps);
    srow.tc_mean_ms = tc_m;
    srow.tc_std_ms = tc_s;
    srow.texp_mean_s = te_m;
    srow.texp_std_s = te_s;
    srow.completion_pct = mean_std(completions).first;
    srow.deadends = mean_std(deadends).first;
    srow.any_failed = row_failed;
    result.rows.push_back(srow);
  }

  if (write) {
    std::ofstream(spec.out_dir + "/summary.csv") << summary_csv(result.rows);
  }
  return result;
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "scenario,r,mode,runs,tc_mean_ms,tc_std_ms,texp_mean_s,texp_std_s,"
         "completion_pct,deadends\n";
  char buf[256];
  for (const SummaryRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%s,%g,%s,%d,%.3f,%.3f,%.3f,%.3f,%.3f,%.3f\n",
                  r.scenario.c_str(), r.resolution, r.mode.c_str(), r.runs,
                  r.tc_mean_ms, r.tc_std_ms, r.texp_mean_s, r.texp_std_s,
                  r.completion_pct, r.deadends);
    out << buf;
  }
  return out.str();
}

}  // namespace nbv
