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

/** \file spectra.hpp
 *
 *  \brief Model quantum Hamiltonians, their spectra and smoothed spectral traces.
 */
#pragma once

#include <limits>
#include <vector>

#include "semitrace/common.hpp"
#include "semitrace/potential.hpp"
#include "semitrace/test_function.hpp"

namespace semitrace {

enum class ModelKind { circle_translation, schrodinger_1d, oscillator_2d };

struct SpectralModel {
  ModelKind kind = ModelKind::circle_translation;
  double h = 0.1;
  /// circle: |n| <= truncation. schrodinger_1d: grid points (0 = automatic).
  int truncation = 0;
  /// schrodinger_1d / oscillator_2d: energies up to e_max must be resolved.
  double e_max = 1.0;
  Potential potential;
  /// schrodinger_1d box [-L, L]; 0 = automatic.
  double half_width = 0.0;
  double w1 = 1.0;
  double w2 = 1.0;

  static SpectralModel circle(double h, int truncation);
  static SpectralModel schrodinger(Potential v, double h, double e_max, int grid = 0);
  static SpectralModel oscillator(double w1, double w2, double h, double e_max);
};

/// Sorted eigenvalues, complete on [complete_lo, complete_hi].
struct Spectrum {
  std::vector<double> values;
  double complete_lo = -std::numeric_limits<double>::infinity();
  double complete_hi = std::numeric_limits<double>::infinity();
};

/// Eigenvalues: circle {h n}; schrodinger_1d by Fourier pseudospectral
/// discretization of -h^2 d^2/dx^2 + V on a periodic box around the wells;
/// oscillator_2d {h(w1 (n + 1/2) + w2 (m + 1/2))} up to e_max.
Spectrum model_spectrum(const SpectralModel& model);

/// Discretized Hamiltonian (schrodinger_1d only), symmetric.
Matrix model_hamiltonian(const SpectralModel& model);

/// Grid of a schrodinger_1d model: box half-width and point count.
struct SchrodingerGrid {
  double half_width;
  int points;
};
SchrodingerGrid schrodinger_grid(const SpectralModel& model);

/// sum_j f((E_j - z_ref) / h) chi(E_j). The spectrum must be complete on supp chi.
Complex spectral_trace(const Spectrum& spectrum, const TestFunction& f, const EnergyWindow& chi,
                       double h, double z_ref = 0.0);

/// ||(A - z)^{-1}||_2 from the smallest singular value of A - z.
double resolvent_norm(const ComplexMatrix& a, Complex z);

}  // namespace semitrace
