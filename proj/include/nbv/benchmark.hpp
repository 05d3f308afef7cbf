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
#include <string>
#include <vector>

#include "nbv/runner.hpp"

namespace nbv {

struct BenchRow {
  std::string scenario_path;
  double resolution{0.0};  ///< 0 = scenario default
  PlannerMode mode{PlannerMode::RscCuboid};
};

struct BenchmarkSpec {
  std::vector<BenchRow> rows;
  std::vector<std::uint64_t> seeds;  ///< one run per (row, seed); must be distinct
  std::string out_dir;               ///< empty = no files written
  RunConfig base;                    ///< overrides applied on top of each scenario
};

struct SummaryRow {
  std::string scenario;
  double resolution{0.0};
  std::string mode;
  int runs{0};
  double tc_mean_ms{0.0};
  double tc_std_ms{0.0};
  double texp_mean_s{0.0};
  double texp_std_s{0.0};
  double completion_pct{0.0};  ///< mean over runs
  double deadends{0.0};        ///< mean per run
  bool any_failed{false};
};

struct BenchmarkResult {
  std::vector<SummaryRow> rows;
  std::vector<ExplorationLog> logs;
  bool any_failed{false};
};

/// Executes every (row, seed) run sequentially, writes per-run CSVs and one
/// summary CSV under spec.out_dir (when set), and aggregates per-row means
/// and population standard deviations. Failed runs are recorded and excluded
/// from the aggregates; the row and result carry a failure flag.
BenchmarkResult run_benchmark(const BenchmarkSpec& spec);

/// Two-column CSV (t_s, explored_m3) of a run's explored-volume curve,
/// suitable for external plotting. Truncated runs are flagged in a header
/// comment.
std::string emit_volume_curve(const ExplorationLog& log);

std::string summary_csv(const std::vector<SummaryRow>& rows);

/// Mean and population standard deviation (stddev 0 for a single value).
std::pair<double, double> mean_std(const std::vector<double>& values);

}  // namespace nbv
