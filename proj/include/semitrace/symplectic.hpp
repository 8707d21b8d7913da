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

/** \file symplectic.hpp
 *
 *  \brief Linear symplectic algebra on T*R^n.
 *
 *  Coordinates are ordered (x_1..x_n, xi_1..xi_n) and the symplectic form is
 *
 *      omega(u, v) = <u_x, v_xi> - <u_xi, v_x> = u^T J v,   J = [[0, I], [-I, 0]],
 *
 *  i.e. omega = dx ^ dxi. With this orientation the Hoermander-Kashiwara index
 *  of (graph dkappa, diagonal, {0}+R^n+R^n+{0}) is minus the signature of the
 *  Hessian of phi(x, eta) - x.eta, and the Maslov index of a short positive
 *  definite Hamiltonian flow is negative, as stationary phase requires.
 *  Every sign in this library is derived from this one convention.
 */
#pragma once

#include <random>

#include "semitrace/common.hpp"

namespace semitrace {

/// The matrix J of omega on T*R^n (2n x 2n).
Matrix standard_form(int n);

/// diag(J, -J): the form omega_1 - omega_2 on T*R^n x T*R^n, coordinates (x, xi, y, eta).
Matrix doubled_form(int n);

/// omega(u, v) with the standard form.
double omega(const Vector& u, const Vector& v);

/// A real 2n x 2n matrix S with S^T J S = J.
///
/// The 0 x 0 matrix is a valid element (the reduced monodromy of a one degree
/// of freedom orbit).
class SymplecticMatrix {
 public:
  /// Validates ||S^T J S - J||_inf <= tol * ||S||_inf^2 and det S = 1 within 1e-8.
  explicit SymplecticMatrix(Matrix entries, double tol = 1e-10);

  static SymplecticMatrix identity(int n);

  const Matrix& matrix() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  int degrees_of_freedom() const { return dim() / 2; }
  bool empty() const { return m_.size() == 0; }

  /// S^{-1} = -J S^T J.
  SymplecticMatrix inverse() const;
  /// S^k for any integer k.
  SymplecticMatrix power(int k) const;

  SymplecticMatrix operator*(const SymplecticMatrix& other) const;

  /// ||S^T J S - J||_inf.
  double symplectic_defect() const;

 private:
  struct Unchecked {};
  SymplecticMatrix(Matrix entries, Unchecked) : m_(std::move(entries)) {}

  Matrix m_;
};

struct Signature {
  int plus = 0;
  int minus = 0;
  int zero = 0;

  int value() const { return plus - minus; }
  int dim() const { return plus + minus + zero; }
};

/// Inertia of a symmetric matrix. Eigenvalues with |mu| <= tol * ||M||_2 count as zero.
/// Throws PreconditionError when ||M - M^T||_inf > tol * max(1, ||M||_inf).
Signature signature(const Matrix& m, double tol = 1e-8);

/// A Lagrangian subspace, stored as a basis (columns) together with the
/// symplectic form of the ambient space it lives in.
class LagrangianFrame {
 public:
  /// `form` defaults to the standard J of the ambient dimension.
  explicit LagrangianFrame(Matrix basis);
  /// Validates isotropy ||B^T w B||_inf <= iso_tol * ||B||_inf^2 and full rank.
  LagrangianFrame(Matrix basis, Matrix form, double iso_tol = 1e-10);

  const Matrix& basis() const { return basis_; }
  const Matrix& form() const { return form_; }
  int ambient_dim() const { return static_cast<int>(basis_.rows()); }
  int dim() const { return static_cast<int>(basis_.cols()); }

  /// Image under a linear map T of the ambient space (T must preserve form()).
  LagrangianFrame transformed(const Matrix& t) const;

  /// Orthonormal basis of the same subspace.
  Matrix orthonormal_basis() const;

 private:
  Matrix basis_;
  Matrix form_;
};

/// Hoermander-Kashiwara index s(l1, l2, l3): signature of
/// Q(v1 + v2 + v3) = omega(v1, v2) + omega(v2, v3) + omega(v3, v1).
int hk_index(const LagrangianFrame& l1, const LagrangianFrame& l2,
             const LagrangianFrame& l3, double tol = 1e-8);

/// Gram matrix of the Hoermander-Kashiwara form in the frame bases (3N x 3N).
Matrix hk_gram(const LagrangianFrame& l1, const LagrangianFrame& l2,
               const LagrangianFrame& l3);

/// Graph {(Sv, v)} of S inside T*R^n x T*R^n with the form omega_1 - omega_2.
LagrangianFrame graph_lagrangian(const SymplecticMatrix& s);
LagrangianFrame graph_lagrangian(const Matrix& s, double iso_tol = 1e-10);

/// The diagonal of T*R^n x T*R^n.
LagrangianFrame diagonal_lagrangian(int n);

/// {0} + R^n + R^n + {0}: the (xi, y) plane of T*R^n x T*R^n.
LagrangianFrame mixed_lagrangian(int n);

/// Quadratic generating phase phi(x, eta) with critical point at the origin:
///   phi = value0 + x.alpha.x/2 + x.beta.eta + eta.gamma.eta/2.
struct QuadraticPhase {
  Matrix xx;      ///< phi''_xx (symmetric)
  Matrix xeta;    ///< phi''_{x eta}, entry (i, j) = d^2 phi / dx_i d eta_j
  Matrix etaeta;  ///< phi''_{eta eta} (symmetric)
  double value0 = 0.0;

  QuadraticPhase(Matrix alpha, Matrix beta, Matrix gamma, double value = 0.0);

  int n() const { return static_cast<int>(xx.rows()); }
  double operator()(const Vector& x, const Vector& eta) const;

  /// Hessian of phi(x, eta) - x.eta, i.e. [[alpha, beta - I], [beta^T - I, gamma]].
  Matrix bordered_hessian() const;
};

/// Linearization of kappa: (phi'_eta, eta) -> (x, phi'_x) at the origin.
/// Throws PreconditionError("phase not graph-like") when |det phi''_{x eta}| < 1e-8.
SymplecticMatrix dkappa_from_phase(const QuadraticPhase& phase);

/// exp(J_H A) for A symmetric with entries uniform in [-scale, scale].
SymplecticMatrix random_symplectic(int n, std::mt19937_64& rng, double scale = 1.0);

/// Random symmetric matrix with entries uniform in [-scale, scale].
Matrix random_symmetric(int n, std::mt19937_64& rng, double scale = 1.0);

/// Random Lagrangian subspace of the standard T*R^n (graph of a random symmetric map
/// rotated by a random orthogonal symplectic matrix).
LagrangianFrame random_lagrangian(int n, std::mt19937_64& rng);

}  // namespace semitrace
