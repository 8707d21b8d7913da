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

/** \file test_function.hpp
 *
 *  \brief Band-limited test functions f given through a compactly supported
 *  Fourier transform, and smooth energy cutoffs chi.
 *
 *  Fourier convention: fhat(t) = int f(lambda) e^{-i lambda t} d lambda,
 *  f(lambda) = (1/2 pi) int fhat(t) e^{i lambda t} dt. With it the circle
 *  identity reads sum_n f(n) = sum_m fhat(2 pi m).
 */
#pragma once

#include <utility>
#include <vector>

#include "semitrace/common.hpp"

namespace semitrace {

/// Profile a * e * exp(-1 / (1 - s^2)), s = (t - center) / half_width; equals a at the center.
struct Bump {
  double center = 0.0;
  double half_width = 1.0;
  Complex amplitude = 1.0;
};

class TestFunction {
 public:
  explicit TestFunction(std::vector<Bump> bumps);

  /// Single bump with fhat(center) = amplitude.
  static TestFunction bump(double center, double half_width, Complex amplitude = 1.0);
  /// Bumps at +-center with conjugate amplitudes, so f is real.
  static TestFunction real_pair(double center, double half_width, Complex amplitude = 1.0);

  const std::vector<Bump>& bumps() const { return bumps_; }

  Complex fhat(double t) const;
  /// f(lambda) by composite Gauss-Legendre quadrature, node count scaled with |lambda| delta.
  Complex operator()(double lambda) const;

  /// Support intervals [center - delta, center + delta], one per bump.
  std::vector<std::pair<double, double>> support() const;
  /// Largest |t| in the support.
  double reach() const;
  bool support_contains_zero() const;
  /// fhat(-t) = conj(fhat(t)) for every t, i.e. f is real.
  bool is_real() const;

  TestFunction operator+(const TestFunction& other) const;
  TestFunction scaled(Complex c) const;

 private:
  std::vector<Bump> bumps_;
};

/// int_{-1}^{1} e exp(-1/(1-s^2)) cos(kappa s) ds.
double bump_transform(double kappa);

/// Smooth cutoff: 1 on [a, b], 0 outside [a - r, b + r], C-infinity transitions.
class EnergyWindow {
 public:
  EnergyWindow(double a, double b, double rolloff);
  /// Plateau [a, b] with the default rolloff of 10% of b - a.
  static EnergyWindow plateau(double a, double b);
  /// chi identically zero.
  static EnergyWindow zero();

  double operator()(double e) const;
  double derivative(double e) const;

  double lower() const { return a_; }
  double upper() const { return b_; }
  double rolloff() const { return r_; }
  bool is_zero() const { return zero_; }
  /// [a - r, b + r].
  std::pair<double, double> support() const { return {a_ - r_, b_ + r_}; }

 private:
  EnergyWindow() = default;
  double a_ = 0.0;
  double b_ = 0.0;
  double r_ = 0.0;
  bool zero_ = false;
};

/// C-infinity step: 0 for u <= 0, 1 for u >= 1.
double smooth_step(double u);
double smooth_step_derivative(double u);

}  // namespace semitrace
