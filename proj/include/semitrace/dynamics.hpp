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

/** \file dynamics.hpp
 *
 *  \brief Hamiltonian systems p(m, z) on R^{2n} and their flows.
 *
 *  Hamilton's equations are x' = dp/dxi, xi' = -dp/dx, i.e. m' = J grad p with
 *  J the matrix of omega (see symplectic.hpp). The variational equation
 *  M' = J Hess p M is integrated alongside the state.
 */
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "semitrace/common.hpp"
#include "semitrace/potential.hpp"

namespace semitrace {

class HamiltonianSystem {
 public:
  using ScalarFn = std::function<double(const Vector&, double)>;
  using GradientFn = std::function<Vector(const Vector&, double)>;
  using HessianFn = std::function<Matrix(const Vector&, double)>;

  /// Registers a system. Gradient and Hessian are checked against central
  /// finite differences at random probes (relative 1e-6); a mismatch throws
  /// PreconditionError.
  HamiltonianSystem(std::string name, int dof, ScalarFn p, GradientFn gradient,
                    HessianFn hessian, ScalarFn dp_dz);

  const std::string& name() const { return name_; }
  int dof() const { return dof_; }

  double p(const Vector& m, double z) const { return p_(m, z); }
  Vector gradient(const Vector& m, double z) const { return gradient_(m, z); }
  Matrix hessian(const Vector& m, double z) const { return hessian_(m, z); }
  /// sigma(d_z P(z)); -1 for the family P - z.
  double dp_dz(const Vector& m, double z) const { return dp_dz_(m, z); }

  /// H_p(m) = (dp/dxi, -dp/dx).
  Vector vector_field(const Vector& m, double z) const;

 private:
  std::string name_;
  int dof_;
  ScalarFn p_;
  GradientFn gradient_;
  HessianFn hessian_;
  ScalarFn dp_dz_;
};

/// p = (xi_1^2 + xi_2^2 + w1^2 x_1^2 + w2^2 x_2^2)/2 - z.
HamiltonianSystem anisotropic_oscillator(double w1, double w2);

/// p = xi^2 + V(x) - z.
HamiltonianSystem well_system(const Potential& v);

/// p = (|xi|^2 + w1^2 x_1^2 + w2^2 x_2^2)/2 + eps x_1^2 x_2^2 - z (non-integrable for eps != 0).
HamiltonianSystem coupled_quartic(double w1, double w2, double eps);

struct FlowResult {
  Vector point;
  Matrix variational;  ///< D_m Phi_t
  double time = 0.0;
};

/// Phi_t(m) and D_m Phi_t by an adaptive Dormand-Prince 5(4) integrator with
/// absolute and relative step tolerance `tol`. t may be negative.
/// Throws NumericalError (with the last good time) on step-size underflow.
FlowResult integrate_flow(const HamiltonianSystem& sys, double z, const Vector& m, double t,
                          double tol);

/// Flow sampled at the given (monotone) times, all starting from m at time 0.
std::vector<FlowResult> sample_flow(const HamiltonianSystem& sys, double z, const Vector& m,
                                    const std::vector<double>& times, double tol);

/// First time t in (t_min, t_max] at which g(Phi_t m) = <normal, Phi_t m - base>
/// crosses zero with the same orientation as the flow through the section.
/// Returns the state there, or throws NumericalError if no return happens.
FlowResult first_return(const HamiltonianSystem& sys, double z, const Vector& m,
                        const Vector& base, const Vector& normal, double t_min, double t_max,
                        double tol);

}  // namespace semitrace
