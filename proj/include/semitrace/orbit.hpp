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

/** \file orbit.hpp
 *
 *  \brief Closed orbits of a Hamiltonian flow on an energy shell: Newton
 *  search on a transversal section, period, action, linearized Poincare map
 *  and the Maslov indices nu_k of the repeated orbits.
 */
#pragma once

#include <map>
#include <vector>

#include "semitrace/dynamics.hpp"
#include "semitrace/maslov.hpp"
#include "semitrace/symplectic.hpp"

namespace semitrace {

/// Hyperplane {<normal, m - base> = 0} through a point of the orbit.
struct SectionSpec {
  Vector base;
  Vector normal;

  /// Section orthogonal to the flow at `base`.
  static SectionSpec orthogonal(const HamiltonianSystem& sys, double z, const Vector& base);

  /// |<normal, H_p(base)>| >= 1e-6 |normal| |H_p(base)|, else PreconditionError.
  void validate(const HamiltonianSystem& sys, double z) const;
};

struct OrbitOptions {
  double orbit_tol = 1e-9;        ///< closure and energy residual
  double integrator_tol = 1e-12;  ///< per-unit-time error of the flow integrator
  int max_iterations = 50;
  double time_budget = 10.0;      ///< multiples of the period estimate allowed for the first return
  int samples = 256;              ///< trajectory samples per period
  MaslovOptions maslov{};
};

struct NondegeneracyEntry {
  int k;
  double det;  ///< det(dC^k - I)
  bool pass;
};

class ClosedOrbit {
 public:
  ClosedOrbit(HamiltonianSystem sys, double z, Vector point, double period, SectionSpec section,
              OrbitOptions options);

  const HamiltonianSystem& system() const { return sys_; }
  double energy() const { return z_; }
  const Vector& point() const { return point_; }
  double period() const { return period_; }
  double action() const { return action_; }
  double residual() const { return residual_; }
  int newton_iterations() const { return newton_iterations_; }
  const SectionSpec& section() const { return section_; }
  const OrbitOptions& options() const { return options_; }

  /// Trajectory samples at t_j = j T / samples, j = 0..samples.
  const std::vector<FlowResult>& samples() const { return samples_; }
  const SymplecticMatrix& monodromy() const { return monodromy_; }
  const SymplecticMatrix& reduced_monodromy() const { return reduced_; }
  /// Symplectic basis of the section-shell subspace in which dC is expressed.
  const Matrix& section_frame() const { return frame_; }

  /// Number of reversals of the velocity dx/dt over one period.
  int turning_points() const { return turning_points_; }

  /// nu_k for 1 <= |k| <= N (filled by find_closed_orbit).
  const std::map<int, int>& maslov() const { return maslov_; }
  int maslov(int k) const;

  /// D Phi_t at the base point, any real t.
  Matrix linearized_flow(double t) const;
  Vector point_at(double t) const;

 private:
  friend ClosedOrbit find_closed_orbit(const HamiltonianSystem&, double, const Vector&,
                                       const SectionSpec&, int, const OrbitOptions&);

  HamiltonianSystem sys_;
  double z_;
  Vector point_;
  double period_;
  SectionSpec section_;
  OrbitOptions options_;
  double action_ = 0.0;
  double residual_ = 0.0;
  int newton_iterations_ = 0;
  std::vector<FlowResult> samples_;
  SymplecticMatrix monodromy_;
  SymplecticMatrix reduced_;
  Matrix frame_;
  int turning_points_ = 0;
  std::map<int, int> maslov_;
};

/// Newton iteration for Phi_T(m) = m, p(m, z) = 0, m on the section, started
/// from `guess` with T the first return time. Computes nu_k for |k| <= N.
ClosedOrbit find_closed_orbit(const HamiltonianSystem& sys, double z, const Vector& guess,
                              const SectionSpec& section, int N,
                              const OrbitOptions& options = {});

/// Closed-loop integral of xi . dx by the periodic trapezoid rule on
/// `samples` equally spaced points (0: use the stored trajectory).
double orbit_action(const ClosedOrbit& orbit, int samples = 0);

/// Linearized Poincare map on `section`, in a symplectic basis of
/// {v : <normal, v> = 0, <grad p, v> = 0}. Empty for one degree of freedom.
SymplecticMatrix reduce_monodromy(const ClosedOrbit& orbit, const SectionSpec& section);

/// det(dC^k - I) for 1 <= |k| <= N; fails when |det| < tol.
std::vector<NondegeneracyEntry> check_nondegeneracy(const SymplecticMatrix& dc, int N, double tol);

/// Maslov index of t -> (reduced linearized flow from 0 to t), 0 <= t <= |k| T,
/// run backwards in time for k < 0, minus k times the turning-point count.
int orbit_maslov(const ClosedOrbit& orbit, int k);

/// Transverse part only (the Maslov index of the reduced path).
int orbit_transverse_maslov(const ClosedOrbit& orbit, int k);

}  // namespace semitrace
