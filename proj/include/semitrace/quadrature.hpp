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

/** \file quadrature.hpp
 *
 *  \brief Composite Gauss-Legendre quadrature on intervals.
 */
#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace semitrace {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// 20-point Gauss-Legendre rule on [-1, 1].
const QuadratureRule& gauss_legendre20();

/// Nodes and weights of the composite 20-point rule with `panels` equal panels on [a, b].
QuadratureRule composite_rule(double a, double b, int panels);

template <class F>
auto integrate_composite(F&& f, double a, double b, int panels) -> decltype(f(a)) {
  const auto& r = gauss_legendre20();
  const double hw = 0.5 * (b - a) / panels;
  decltype(f(a)) sum{};
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (2 * p + 1) * hw;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) sum += r.weights[i] * hw * f(mid + hw * r.nodes[i]);
  }
  return sum;
}

}  // namespace semitrace
