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


#include "semitrace/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <utility>

#include <boost/property_tree/ini_parser.hpp>

namespace semitrace {

namespace pt = boost::property_tree;

namespace {

using Entries = std::vector<std::pair<std::string, std::string>>;

const Entries& common_entries() {
  static const Entries e = {
      {"seed", "1"},
      {"N", "1"},
      {"h_list", "0.1"},
      {"tolerance", "1e-8"},
      {"slope.target", "none"},
      {"slope.tolerance", "0.3"},
      {"slope.min_r2", "0.9"},
      {"slope.exact_floor", "1e-12"},
      {"run.threads", "1"},
  };
  return e;
}

Entries experiment_entries(const std::string& name) {
  const std::string two_pi = "6.283185307179586";
  if (name == "poisson")
    return {{"N", "2"},
            {"f.center", two_pi},
            {"f.half_width", "1.0"},
            {"f.amp_re", "1.0"},
            {"f.amp_im", "0.0"},
            {"f.real", "false"}};
  if (name == "gutzwiller")
    return {{"N", "2"},
            {"h_list", "0.02 0.01 0.005"},
            {"tolerance", "0.5"},
            {"slope.target", "1"},
            {"slope.tolerance", "0.3"},
            {"model.w1", "1.0"},
            {"model.w2", "1.4142135623730951"},
            {"model.z", "1.0"},
            {"model.mode", "1"},
            {"model.guess_jitter", "1e-3"},
            {"f.center", "-5.983185307179586"},
            {"f.half_width", "1.2"},
            {"f.amp_re", "1.0"},
            {"f.amp_im", "0.0"},
            {"f.real", "false"},
            {"chi.lower", "0.3"},
            {"chi.upper", "0.8"},
            {"chi.rolloff", "0.6"},
            {"orbit.tol", "1e-9"},
            {"orbit.integrator_tol", "1e-12"},
            {"orbit.max_iterations", "50"},
            {"orbit.samples", "256"},
            {"orbit.det_tol", "1e-8"},
            {"isolation.margin", "0.05"}};
  if (name == "bohr")
    return {{"h_list", "0.05"},
            {"tolerance", "1e-10"},
            {"slope.tolerance", "0.2"},
            {"model.potential", "harmonic"},
            {"model.coefficient", "1.0"},
            {"window.lower", "0.5"},
            {"window.upper", "3.0"},
            {"reference", "analytic"},
            {"spectrum.margin", "0.3"}};
  if (name == "fio-trace")
    return {{"h_list", "0.2 0.1 0.05"},
            {"tolerance", "0.3"},
            {"slope.target", "1"},
            {"slope.tolerance", "0.3"},
            {"phase.alpha", "2.0"},
            {"phase.beta", "1.0"},
            {"phase.gamma", "2.0"},
            {"phase.value0", "0.0"},
            {"phase.max_diff", "0.2"},
            {"amplitude.b0", "1.0"},
            {"amplitude.width", "1.0"},
            {"grid.half_width", "6.0"},
            {"grid.nodes", "0"}};
  if (name == "weyl-check")
    return {{"h_list", "0.2 0.1 0.05"},
            {"tolerance", "1e-2"},
            {"slope.target", "2"},
            {"slope.tolerance", "0.2"},
            {"weyl.symbol", "gaussian"},
            {"weyl.symbol_x_width", "1.0"},
            {"weyl.symbol_xi_width", "1.0"},
            {"weyl.kappa", "wiggle"},
            {"weyl.kappa_amplitude", "0.1"},
            {"weyl.kappa_width", "1.0"},
            {"weyl.affine_scale", "2.0"},
            {"weyl.grid_n", "1210"},
            {"weyl.half_width", "4.0"},
            {"weyl.interior", "2.5"},
            {"weyl.xi_support", "5.2"}};
  if (name == "orbit")
    return {{"N", "2"},
            {"h_list", "2e-3 1e-3 5e-4"},
            {"tolerance", "1e-4"},
            {"slope.target", "2"},
            {"slope.tolerance", "0.3"},
            {"model.kind", "well"},
            {"model.potential", "quartic"},
            {"model.coefficient", "1.0"},
            {"model.w1", "1.0"},
            {"model.w2", "1.4142135623730951"},
            {"model.eps", "0.3"},
            {"model.mode", "1"},
            {"model.z", "1.0"},
            {"model.guess_jitter", "1e-3"},
            {"orbit.tol", "1e-9"},
            {"orbit.integrator_tol", "1e-12"},
            {"orbit.max_iterations", "50"},
            {"orbit.samples", "256"},
            {"orbit.det_tol", "1e-8"}};
  if (name == "monodromy-integral")
    return {{"h_list", "0.1 0.05 0.025"},
            {"tolerance", "0.5"},
            {"slope.target", "1"},
            {"slope.tolerance", "0.3"},
            {"model.kind", "circle"},
            {"model.potential", "harmonic"},
            {"model.coefficient", "1.0"},
            {"k", "1"},
            {"z0", "0.0"},
            {"g.center", "6.783185307179586"},
            {"g.half_width", "2.0"},
            {"chi.lower", "0.1"},
            {"chi.upper", "0.5"},
            {"chi.rolloff", "0.3"}};
  std::ostringstream os;
  os << "config: unknown experiment '" << name << "' (one of";
  for (const auto& n : experiment_names()) os << ' ' << n;
  os << ")";
  throw ConfigError(os.str());
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

// Leaf paths of an INI tree (depth <= 2).
std::vector<std::string> leaf_paths(const pt::ptree& t) {
  std::vector<std::string> out;
  for (const auto& [k, v] : t) {
    if (v.empty()) {
      out.push_back(k);
    } else {
      for (const auto& [k2, v2] : v) out.push_back(k + "." + k2);
    }
  }
  return out;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> n = {"poisson", "gutzwiller", "bohr", "fio-trace",
                                             "weyl-check", "orbit", "monodromy-integral"};
  return n;
}

ExperimentConfig ExperimentConfig::defaults(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment_ = experiment;
  c.tree_.put("experiment", experiment);
  Entries entries = common_entries();
  for (const auto& [k, v] : experiment_entries(experiment)) {
    bool replaced = false;
    for (auto& e : entries)
      if (e.first == k) {
        e.second = v;
        replaced = true;
      }
    if (!replaced) entries.emplace_back(k, v);
  }
  for (const auto& [k, v] : entries) c.tree_.put(k, v);
  return c;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  pt::ptree in;
  std::istringstream is(text);
  try {
    pt::read_ini(is, in);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.message() + " at line " + std::to_string(e.line()));
  }
  const auto name = in.get_optional<std::string>("experiment");
  if (!name) throw ConfigError("config: missing key 'experiment'");
  ExperimentConfig c = defaults(trim(*name));
  for (const auto& key : leaf_paths(in)) {
    if (key == "experiment") continue;
    c.set(key, in.get<std::string>(key));
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot read '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "experiment") throw ConfigError("config: 'experiment' cannot be overridden");
  if (!has(key)) throw ConfigError("config: unknown key '" + key + "' for experiment " + experiment_);
  tree_.put(key, trim(value));
}

bool ExperimentConfig::has(const std::string& key) const { return static_cast<bool>(tree_.get_child_optional(key)); }

std::string ExperimentConfig::get_string(const std::string& key) const {
  const auto v = tree_.get_optional<std::string>(key);
  if (!v) throw ConfigError("config: missing key '" + key + "'");
  return *v;
}

double ExperimentConfig::get_double(const std::string& key) const {
  const std::string s = get_string(key);
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (trim(s.substr(pos)).empty() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config: '" + key + "' = '" + s + "' is not a finite number");
}

int ExperimentConfig::get_int(const std::string& key) const {
  const std::string s = get_string(key);
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (trim(s.substr(pos)).empty()) return static_cast<int>(v);
  } catch (const std::exception&) {
  }
  throw ConfigError("config: '" + key + "' = '" + s + "' is not an integer");
}

bool ExperimentConfig::get_bool(const std::string& key) const {
  const std::string s = get_string(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("config: '" + key + "' = '" + s + "' is not a boolean");
}

bool ExperimentConfig::is_none(const std::string& key) const { return get_string(key) == "none"; }

std::vector<double> ExperimentConfig::h_list() const {
  std::string s = get_string("h_list");
  for (char& ch : s)
    if (ch == ',') ch = ' ';
  std::istringstream is(s);
  std::vector<double> out;
  std::string tok;
  while (is >> tok) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(tok, &pos));
      if (pos != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("config: 'h_list' entry '" + tok + "' is not a number");
    }
  }
  return out;
}

std::uint64_t ExperimentConfig::seed() const {
  const std::string s = get_string("seed");
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError("config: 'seed' = '" + s + "' is not a non-negative integer");
}

std::string ExperimentConfig::to_ini() const {
  std::ostringstream os;
  pt::write_ini(os, tree_);
  return os.str();
}

std::string ExperimentConfig::hash() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : to_ini()) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void ExperimentConfig::validate() const {
  const auto hs = h_list();
  if (hs.empty()) throw ConfigError("config: 'h_list' is empty");
  for (std::size_t i = 0; i < hs.size(); ++i) {
    if (!(hs[i] > 0.0)) throw ConfigError("config: 'h_list' values must be positive");
    if (i > 0 && !(hs[i] < hs[i - 1])) throw ConfigError("config: 'h_list' must be strictly decreasing");
  }
  if (get_int("N") < 1) throw ConfigError("config: 'N' must be at least 1");
  if (get_int("run.threads") < 1) throw ConfigError("config: 'run.threads' must be at least 1");
  if (!(get_double("tolerance") > 0.0)) throw ConfigError("config: 'tolerance' must be positive");
  if (!is_none("slope.target")) get_double("slope.target");
  seed();
  for (const std::string w : {"chi", "window"}) {
    if (!has(w + ".lower")) continue;
    if (!(get_double(w + ".lower") < get_double(w + ".upper")))
      throw ConfigError("config: '" + w + ".lower' must be below '" + w + ".upper'");
    if (has(w + ".rolloff") && !(get_double(w + ".rolloff") > 0.0))
      throw ConfigError("config: '" + w + ".rolloff' must be positive");
  }
  for (const std::string f : {"f", "g"})
    if (has(f + ".half_width") && !(get_double(f + ".half_width") > 0.0))
      throw ConfigError("config: '" + f + ".half_width' must be positive");
}

}  // namespace semitrace
