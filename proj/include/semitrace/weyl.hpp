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

/** \file weyl.hpp
 *
 *  \brief Weyl quantization on a periodic grid and the half-density
 *  invariance of Weyl symbols under changes of variables.
 */
#pragma once

#include <functional>

#include "semitrace/common.hpp"

namespace semitrace {

/// Periodic grid x_j = x_min + j (x_max - x_min) / n, j = 0..n-1 (n even).
struct WeylGrid {
  double x_min = -1.0;
  double x_max = 1.0;
  int n = 128;

  double dx() const { return (x_max - x_min) / n; }
  double x(int j) const { return x_min + j * dx(); }
};

using Symbol = std::function<double(double x, double xi)>;

/// K_jk = (1/n) sum_l a((x_j + x_k)/2, h k_l) e^{i k_l (x_j - x_k)} over the dual
/// wavenumbers k_l (Nyquist mode split evenly), so that (K u)_j approximates
/// (1/2 pi h) int int a((x+y)/2, xi) e^{i (x-y) xi / h} u(y) dy dxi.
/// Refuses grids with fewer than 8 points per wavelength 2 pi h / xi_support.
ComplexMatrix weyl_quantize(const Symbol& a, double h, const WeylGrid& grid, double xi_support);

/// Orientation-preserving diffeomorphism of the line.
struct Diffeomorphism {
  std::function<double(double)> map;
  std::function<double(double)> derivative;
  /// Optional; computed by bracketing when empty.
  std::function<double(double)> inverse;

  double inv(double y) const;
};

/// ||R||_2 on grid points with |x| <= interior, where
/// R = U Op(a~) U^{-1} - Op(a), (U u)(x) = u(kappa(x)) kappa'(x)^{1/2}
/// and a~(kappa(x), xi / kappa'(x)) = a(x, xi).
double weyl_invariance_residual(const Symbol& a, const Diffeomorphism& kappa, double h,
                                const WeylGrid& grid, double xi_support, double interior);

/// Band-limited interpolation weight of sample k at point x on a periodic grid.
double periodic_interpolation_weight(const WeylGrid& grid, double x, int k);

}  // namespace semitrace
