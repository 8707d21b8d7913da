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

/** \file config.hpp
 *
 *  \brief Experiment configuration: a nested key-value (INI) document with
 *  per-experiment defaults, typed access and validation.
 */
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/property_tree/ptree.hpp>

#include "semitrace/common.hpp"

namespace semitrace {

/// Bad configuration; the message names the offending key path.
class ConfigError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

/// Known experiment names.
const std::vector<std::string>& experiment_names();

class ExperimentConfig {
 public:
  /// Every key the experiment reads, with its default value.
  static ExperimentConfig defaults(const std::string& experiment);
  /// INI text; `experiment` is required, other keys overlay the defaults.
  /// Unknown keys are rejected.
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  /// Override one key ("section.key"); the key must exist.
  void set(const std::string& key, const std::string& value);

  const std::string& experiment() const { return experiment_; }
  std::vector<double> h_list() const;
  std::uint64_t seed() const;

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  /// True when the key holds "none".
  bool is_none(const std::string& key) const;

  /// Canonical INI text (sections and keys in a fixed order).
  std::string to_ini() const;
  /// FNV-1a 64 of to_ini(), hex.
  std::string hash() const;

  /// h positive and strictly decreasing, N >= 1, windows well formed.
  void validate() const;

  const boost::property_tree::ptree& tree() const { return tree_; }

 private:
  std::string experiment_;
  boost::property_tree::ptree tree_;
};

}  // namespace semitrace
