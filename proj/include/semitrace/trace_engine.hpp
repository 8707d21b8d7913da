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

/** \file trace_engine.hpp
 *
 *  \brief Right-hand sides of the trace formulae: the circle Poisson
 *  identity, Gutzwiller sums over a closed orbit, the scalar WKB monodromy
 *  with its Bohr-Sommerfeld roots, stationary-phase traces of Fourier
 *  integral operators and the scalar monodromy-trace integral.
 */
#pragma once

#include <array>
#include <functional>
#include <utility>
#include <vector>

#include "semitrace/orbit.hpp"
#include "semitrace/potential.hpp"
#include "semitrace/symplectic.hpp"
#include "semitrace/test_function.hpp"

namespace semitrace {

struct PoissonTerm {
  int k;
  Complex quadrature;  ///< (1/2 pi i) int f(z/h) M^k dM/dz dz
  Complex exact;       ///< fhat(-2 pi (k + 1))
};

struct PoissonResult {
  Complex lhs;
  Complex rhs;
  std::vector<PoissonTerm> terms;
  int truncation = 0;  ///< |n| cut of the spectral sum
};

/// lhs = sum_n f(n) over the circle spectrum {h n}; rhs = sum_{|k| <= N} of the
/// monodromy integrals, each computed by quadrature on the real axis.
/// Requires supp fhat inside (-2 pi N, 2 pi N).
PoissonResult poisson_both_sides(const TestFunction& f, double h, int N);

/// Scalar monodromy M(z, h) = exp(i I(z) / h + i phase) of the circle
/// (p = xi, I = 2 pi z, phase 0) or of a single well (p = xi^2 + V,
/// I = 2 int sqrt(z - V) dx, phase -pi from the two turning points).
class ScalarMonodromy {
 public:
  enum class Kind { circle, well };

  static ScalarMonodromy circle(double h);
  /// V must have a single minimum at `center` and grow on both sides.
  static ScalarMonodromy well(Potential v, double h, double center = 0.0);

  Kind kind() const { return kind_; }
  double h() const { return h_; }
  double maslov_phase() const { return phase_; }
  const Potential& potential() const { return v_; }

  /// Strip constant L of |Im z| <= L h log(1/h).
  double strip_constant() const { return strip_l_; }
  ScalarMonodromy& set_strip_constant(double l);
  double strip_half_width() const;

  /// Lowest allowed energy (V(center) for wells, -infinity for the circle).
  double bottom() const;
  std::pair<double, double> turning_points(double z) const;

  double action(double z) const;
  /// dI/dz.
  double period(double z) const;
  /// I, I', I'', I''' at real z.
  std::array<double, 4> action_jet(double z) const;
  /// Almost analytic extension of I, Taylor order 3 in Im z.
  Complex action(Complex z) const;
  /// d/dz of the extension above (holomorphic part).
  Complex action_derivative(Complex z) const;

  void check_admissible(Complex z) const;

 private:
  Kind kind_ = Kind::circle;
  double h_ = 0.1;
  double phase_ = 0.0;
  double strip_l_ = 2.0;
  Potential v_;
  double center_ = 0.0;
};

/// M(z, h). Throws PreconditionError outside the admissible strip.
Complex scalar_monodromy(const ScalarMonodromy& mono, Complex z);

/// Real roots of 1 - M(z) in [z_lo, z_hi], increasing.
std::vector<double> bohr_sommerfeld_eigenvalues(const ScalarMonodromy& mono, double z_lo, double z_hi);

struct GutzwillerTerm {
  int k;
  double amplitude;  ///< T / |det(dC^k - I)|^{1/2}
  double phase;      ///< k S / h + nu_k pi / 2
  Complex value;     ///< contribution to the sum, with the 1/2 pi and fhat(-kT) chi(z)
};

struct GutzwillerResult {
  Complex value;
  std::vector<GutzwillerTerm> terms;
};

/// (1/2 pi) sum_{0 < |k| <= N} e^{i k S/h + i nu_k pi/2} T fhat(-k T) chi(z) / |det(dC^k - I)|^{1/2}.
/// Refuses when det(dC^k - I) is below `det_tol` for some |k| <= N, or when 0 is in supp fhat.
GutzwillerResult gutzwiller_sum(const ClosedOrbit& orbit, const TestFunction& f, const EnergyWindow& chi,
                                double h, int N, double det_tol = 1e-8);

/// Leading stationary-phase value i^{s/2} b0 e^{i phi(0,0)/h} / |det beta det(dkappa - I)|^{1/2}.
Complex fio_trace_sp(const QuadraticPhase& phase, Complex b0, double h);

using Amplitude = std::function<Complex(const Vector& x, const Vector& eta)>;

/// Tensor Gauss-Legendre grid on [-half_width, half_width]^{2n}.
struct FioGrid {
  double half_width = 6.0;
  int nodes = 0;  ///< per dimension; 0 picks the minimum allowed
};

/// Minimum nodes per dimension: 10 points per local period of the phase at the box edge.
int fio_required_nodes(const QuadraticPhase& phase, double h, double half_width);

/// (2 pi h)^{-n} int e^{i (phi(x, eta) - x.eta) / h} b(x, eta) dx deta by tensor quadrature.
Complex fio_trace_quadrature(const QuadraticPhase& phase, const Amplitude& b, double h,
                             const FioGrid& grid);

struct MonodromyIntegral {
  Complex lhs;
  Complex rhs;
};

/// lhs = (1/2 pi i) int ghat((z - z0)/h) M^{k-1} dM/dz chi(z) dz on the real axis, with
/// ghat(lambda) = int g(t) e^{-i lambda t} dt and g = f.fhat;
/// rhs = e^{i k (I(z0)/h + phase)} T(z0) chi(z0) g(k T(z0)).
MonodromyIntegral monodromy_trace_integral(const ScalarMonodromy& mono, const TestFunction& g,
                                           const EnergyWindow& chi, int k, double z0 = 0.0);

}  // namespace semitrace
