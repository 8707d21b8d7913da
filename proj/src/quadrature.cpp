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


#include "semitrace/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

namespace semitrace {

const QuadratureRule& gauss_legendre20() {
  static const QuadratureRule rule = [] {
    using G = boost::math::quadrature::gauss<double, 20>;
    QuadratureRule r;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = x.size(); i-- > 0;) {
      r.nodes.push_back(-x[i]);
      r.weights.push_back(w[i]);
    }
    for (std::size_t i = 0; i < x.size(); ++i) {
      r.nodes.push_back(x[i]);
      r.weights.push_back(w[i]);
    }
    return r;
  }();
  return rule;
}

QuadratureRule composite_rule(double a, double b, int panels) {
  const auto& r = gauss_legendre20();
  QuadratureRule out;
  const double hw = 0.5 * (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (2 * p + 1) * hw;
    for (std::size_t i = 0; i < r.nodes.size(); ++i) {
      out.nodes.push_back(mid + hw * r.nodes[i]);
      out.weights.push_back(hw * r.weights[i]);
    }
  }
  return out;
}

}  // namespace semitrace
