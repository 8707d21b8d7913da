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


// semitrace: run trace-formula experiments and write reports.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "semitrace/config.hpp"
#include "semitrace/harness.hpp"

namespace st = semitrace;

namespace {

struct Options {
  std::string config;
  std::string h_list;
  std::string out;
  std::vector<std::string> formats{"json"};
  std::vector<std::string> sets;
  long long seed = -1;
  int threads = 0;
  bool plot_data = false;
  bool study = false;
};

int run(const std::string& experiment, const Options& o) {
  st::ExperimentConfig cfg =
      o.config.empty() ? st::ExperimentConfig::defaults(experiment) : st::ExperimentConfig::load(o.config);
  if (cfg.experiment() != experiment)
    throw st::ConfigError("config file is for '" + cfg.experiment() + "', not '" + experiment + "'");
  for (const auto& kv : o.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw st::ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!o.h_list.empty()) cfg.set("h_list", o.h_list);
  if (o.seed >= 0) cfg.set("seed", std::to_string(o.seed));
  if (o.threads > 0) cfg.set("run.threads", std::to_string(o.threads));
  cfg.validate();

  const st::TraceReport rep = o.study ? st::convergence_study(cfg) : st::run_experiment(cfg);

  std::vector<st::ReportFormat> formats;
  for (const auto& f : o.formats) formats.push_back(st::parse_format(f));
  if (o.plot_data) formats.push_back(st::ReportFormat::plot_data);
  for (auto f : formats) {
    if (o.out.empty())
      std::cout << st::render_report(rep, f);
    else {
      const std::string path = st::emit_report(rep, f, o.out);
      std::cerr << "wrote " << path << "\n";
    }
  }

  std::cerr << experiment << ":";
  for (const auto& r : rep.rows) std::cerr << " h=" << r.h << " rel_err=" << r.rel_err;
  if (rep.slope) std::cerr << " slope=" << rep.slope->value << " r2=" << rep.slope->r2;
  std::cerr << (rep.pass ? " PASS" : " FAIL") << "\n";
  for (const auto& n : rep.notes) std::cerr << "  note: " << n << "\n";
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semitrace: semiclassical trace formula experiments"};
  app.set_version_flag("--version", std::string(st::semitrace_version()));
  app.require_subcommand(1);

  Options opts;
  std::string experiment;
  for (const auto& name : st::experiment_names()) {
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    sub->add_option("--config", opts.config, "INI config file")->check(CLI::ExistingFile);
    sub->add_option("--h-list", opts.h_list, "h values, e.g. \"0.2 0.1 0.05\" (strictly decreasing)");
    sub->add_option("--out", opts.out, "output directory (default: stdout)");
    sub->add_option("--format", opts.formats, "json, csv or plot-data (repeatable)")->capture_default_str();
    sub->add_option("--seed", opts.seed, "seed for randomized guesses");
    sub->add_option("--threads", opts.threads, "workers over h values");
    sub->add_option("--set", opts.sets, "override a config key: section.key=value (repeatable)");
    sub->add_flag("--emit-plot-data", opts.plot_data, "also write plot-data");
    sub->add_flag("--study", opts.study, "enforce convergence-study preconditions");
    sub->callback([&experiment, name] { experiment = name; });
  }
  std::string defaults_of;
  auto* defs = app.add_subcommand("defaults", "print the default config of an experiment");
  defs->add_option("experiment", defaults_of, "experiment name")->required()->check(CLI::IsMember(st::experiment_names()));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!defaults_of.empty()) {
      std::cout << st::ExperimentConfig::defaults(defaults_of).to_ini();
      return 0;
    }
    return run(experiment, opts);
  } catch (const st::PreconditionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
