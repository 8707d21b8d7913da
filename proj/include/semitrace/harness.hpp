/*
 * Copyright 2026 The semitrace Authors
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

/** \file harness.hpp
 *
 *  \brief Experiment execution: both sides of a trace identity per h,
 *  convergence fits over h, and report emission.
 */
#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "semitrace/common.hpp"
#include "semitrace/config.hpp"

namespace semitrace {

struct ReportRow {
  double h = 0.0;
  Complex lhs;
  Complex rhs;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double runtime_s = 0.0;
};

struct SlopeFit {
  double value = 0.0;
  double half_width = 0.0;  ///< 95% Student-t
  double r2 = 0.0;
  bool conclusive = true;
};

struct TraceReport {
  std::string experiment;
  std::string config_hash;
  std::string version;
  std::uint64_t seed = 0;
  std::vector<ReportRow> rows;
  std::optional<SlopeFit> slope;
  std::optional<double> slope_target;
  double slope_tolerance = 0.0;
  double tolerance = 0.0;
  bool exact_identity = false;
  bool pass = false;
  std::vector<std::string> notes;
  nlohmann::ordered_json extra = nlohmann::ordered_json::object();
};

/// Version string baked in at build time.
const char* semitrace_version();

/// Runs the configured experiment for every h (in parallel when
/// run.threads > 1) and evaluates the pass/fail rules.
TraceReport run_experiment(const ExperimentConfig& config);

/// run_experiment with the preconditions of a convergence study enforced:
/// at least 3 h values spanning a factor 4 and a slope target.
TraceReport convergence_study(const ExperimentConfig& config);

/// Least-squares fit of log err against log h. Needs >= 3 points.
SlopeFit fit_slope(const std::vector<double>& h, const std::vector<double>& err, double min_r2);

struct PeriodPoint {
  std::string label;  ///< e.g. "k=1 T=6.2832 (x1 mode)"
  double t;
};

/// Periods lying in the support of fhat (widened by `margin`). Refuses when
/// more than one period lands there, naming them.
void check_period_isolation(const std::vector<std::pair<double, double>>& support,
                            const std::vector<PeriodPoint>& periods, double margin);

enum class ReportFormat { json, csv, plot_data };

ReportFormat parse_format(const std::string& name);
std::string report_json(const TraceReport& report);
std::string report_csv(const TraceReport& report);
std::string report_plot_data(const TraceReport& report);
std::string render_report(const TraceReport& report, ReportFormat format);
/// Writes <experiment>.<ext> into `dir` (created if missing); returns the path.
/// Throws PreconditionError when the path cannot be written.
std::string emit_report(const TraceReport& report, ReportFormat format, const std::string& dir);

}  // namespace semitrace
