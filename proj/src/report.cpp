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


#include <cstdio>
#include <filesystem>
#include <fstream>

#include "semitrace/harness.hpp"

namespace semitrace {

using json = nlohmann::ordered_json;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ReportFormat parse_format(const std::string& name) {
  if (name == "json") return ReportFormat::json;
  if (name == "csv") return ReportFormat::csv;
  if (name == "plot-data") return ReportFormat::plot_data;
  throw PreconditionError("unknown report format '" + name + "' (json, csv or plot-data)");
}

std::string report_json(const TraceReport& r) {
  json j;
  j["config_hash"] = r.config_hash;
  j["seed"] = r.seed;
  j["experiment"] = r.experiment;
  j["version"] = r.version;
  json rows = json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"h", row.h},
                    {"lhs", {row.lhs.real(), row.lhs.imag()}},
                    {"rhs", {row.rhs.real(), row.rhs.imag()}},
                    {"abs_err", row.abs_err},
                    {"rel_err", row.rel_err},
                    {"runtime_s", row.runtime_s}});
  j["rows"] = rows;
  if (r.slope)
    j["slope"] = {{"value", r.slope->value}, {"half_width", r.slope->half_width}, {"r2", r.slope->r2},
                  {"conclusive", r.slope->conclusive}};
  else
    j["slope"] = nullptr;
  j["pass"] = r.pass;
  j["tolerance"] = r.tolerance;
  if (r.slope_target)
    j["slope_target"] = {{"value", *r.slope_target}, {"tolerance", r.slope_tolerance}};
  else
    j["slope_target"] = nullptr;
  j["exact_identity"] = r.exact_identity;
  j["notes"] = r.notes;
  j["extra"] = r.extra;
  return j.dump(2) + "\n";
}

std::string report_csv(const TraceReport& r) {
  std::string s = "h,lhs_re,lhs_im,rhs_re,rhs_im,abs_err,rel_err,runtime_s\n";
  for (const auto& row : r.rows) {
    const double v[] = {row.h, row.lhs.real(), row.lhs.imag(), row.rhs.real(), row.rhs.imag(),
                        row.abs_err, row.rel_err, row.runtime_s};
    for (int i = 0; i < 8; ++i) s += (i ? "," : "") + g17(v[i]);
    s += "\n";
  }
  return s;
}

std::string report_plot_data(const TraceReport& r) {
  std::string s = "# semitrace " + r.experiment + " config " + r.config_hash + " seed " + std::to_string(r.seed) + "\n";
  if (r.slope) s += "# slope " + g17(r.slope->value) + " +- " + g17(r.slope->half_width) + " r2 " + g17(r.slope->r2) + "\n";
  s += "# columns: h rel_err  (gnuplot: plot 'FILE' using 1:2 with linespoints; set logscale xy)\n";
  for (const auto& row : r.rows) s += g17(row.h) + " " + g17(row.rel_err) + "\n";
  return s;
}

std::string render_report(const TraceReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::json:
      return report_json(report);
    case ReportFormat::csv:
      return report_csv(report);
    case ReportFormat::plot_data:
      return report_plot_data(report);
  }
  return {};
}

std::string emit_report(const TraceReport& report, ReportFormat format, const std::string& dir) {
  namespace fs = std::filesystem;
  const char* ext = format == ReportFormat::json ? "json" : format == ReportFormat::csv ? "csv" : "dat";
  const fs::path path = fs::path(dir) / (report.experiment + "." + ext);
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw PreconditionError("cannot write report to '" + path.string() + "'");
  f << render_report(report, format);
  f.close();
  if (!f) throw PreconditionError("write failed for '" + path.string() + "'");
  return path.string();
}

}  // namespace semitrace
