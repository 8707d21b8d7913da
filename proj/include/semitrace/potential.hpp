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

/** \file potential.hpp
 *
 *  \brief One-dimensional potentials V(x) shared by the classical, quantum and
 *  WKB models (symbol p = xi^2 + V(x)).
 */
#pragma once

#include <functional>
#include <string>
#include <vector>

namespace semitrace {

struct Potential {
  std::string name;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  std::function<double(double)> second;

  double operator()(double x) const { return value(x); }
};

/// sum_k c_k x^k.
Potential polynomial_potential(std::vector<double> coefficients, std::string name = "poly");

/// c x^2.
Potential harmonic_potential(double c = 1.0);

/// c x^4.
Potential quartic_potential(double c = 1.0);

}  // namespace semitrace
