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

/** \file functional_calculus.hpp
 *
 *  \brief Almost analytic extensions of sampled functions and the
 *  Helffer-Sjostrand formula
 *
 *      g(A) = -(1/pi) int dbar g~(z) (z - A)^{-1} dx dy
 *
 *  for Hermitian matrices A.
 */
#pragma once

#include <vector>

#include "semitrace/common.hpp"

namespace semitrace {

/// Samples g(x0 + i dx), i = 0..n-1.
struct SampledFunction {
  double x0 = 0.0;
  double dx = 1.0;
  std::vector<double> values;

  double x_begin() const { return x0; }
  double x_end() const { return x0 + dx * (static_cast<double>(values.size()) - 1); }

  template <class F>
  static SampledFunction sample(F&& f, double a, double b, int n) {
    SampledFunction s;
    s.x0 = a;
    s.dx = (b - a) / (n - 1);
    for (int i = 0; i < n; ++i) s.values.push_back(f(a + i * s.dx));
    return s;
  }
};

/// g~(x + iy) = sum_{j <= order} g^{(j)}(x) (iy)^j / j!.
///
/// Samples that vanish at both ends are treated as one period of a smooth
/// periodic function and differentiated through their trigonometric
/// interpolant; otherwise derivatives come from the interpolating polynomial
/// on the `stencil` nearest samples (exact for polynomials of degree < stencil).
class AlmostAnalyticExtension {
 public:
  AlmostAnalyticExtension(SampledFunction g, int order, int stencil = 12);

  int order() const { return order_; }
  const SampledFunction& samples() const { return g_; }
  bool spectral() const { return spectral_; }

  /// g^{(j)}(x) for j <= order + 1.
  double derivative(int j, double x) const;
  /// All derivatives 0..order+1 at x.
  std::vector<double> derivatives(double x) const;

  Complex operator()(Complex z) const;
  /// dbar g~ = (1/2) g^{(order+1)}(x) (iy)^order / order!.
  Complex dbar(Complex z) const;

 private:
  SampledFunction g_;
  int order_;
  int stencil_;
  bool spectral_ = false;
  std::vector<Complex> coeffs_;
  std::vector<double> wavenumbers_;
};

struct HsOptions {
  int order = 3;
  int x_nodes = 200;
  int y_nodes = 200;
  /// Half-height of the integration rectangle; the extension is cut off
  /// smoothly for Y/2 <= |y| <= Y.
  double y_max = 0.25;
  int stencil = 12;
};

/// Helffer-Sjostrand approximation of g(A); the rectangle spans the sample range of g.
ComplexMatrix hs_functional_calculus(const ComplexMatrix& a, const SampledFunction& g,
                                     const HsOptions& options = {});

/// Reference g(A) from the eigendecomposition, g evaluated by interpolation of the samples.
ComplexMatrix eig_functional_calculus(const ComplexMatrix& a, const SampledFunction& g, int stencil = 12);

/// Finite-difference weights (Fornberg) for derivatives 0..m at x0 from nodes x.
/// Entry (k, i) multiplies f(x_i) for the k-th derivative.
Matrix fornberg_weights(double x0, const std::vector<double>& x, int m);

}  // namespace semitrace
