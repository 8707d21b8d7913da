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


#include "semitrace/potential.hpp"

#include <cmath>
#include <utility>

namespace semitrace {

Potential polynomial_potential(std::vector<double> c, std::string name) {
  auto horner = [](const std::vector<double>& a, double x) {
    double s = 0.0;
    for (auto it = a.rbegin(); it != a.rend(); ++it) s = s * x + *it;
    return s;
  };
  auto derive = [](const std::vector<double>& a) {
    std::vector<double> d;
    for (std::size_t k = 1; k < a.size(); ++k) d.push_back(static_cast<double>(k) * a[k]);
    return d;
  };
  auto d1 = derive(c);
  auto d2 = derive(d1);
  Potential v;
  v.name = std::move(name);
  v.value = [c, horner](double x) { return horner(c, x); };
  v.derivative = [d1, horner](double x) { return horner(d1, x); };
  v.second = [d2, horner](double x) { return horner(d2, x); };
  return v;
}

Potential harmonic_potential(double c) {
  return polynomial_potential({0.0, 0.0, c}, "harmonic");
}

Potential quartic_potential(double c) {
  return polynomial_potential({0.0, 0.0, 0.0, 0.0, c}, "quartic");
}

}  // namespace semitrace
