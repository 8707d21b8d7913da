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

#include "semitrace/symplectic.hpp"

#include <cmath>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

namespace semitrace {

Matrix standard_form(int n) {
  Matrix j = Matrix::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n) = Matrix::Identity(n, n);
  j.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
  return j;
}

Matrix doubled_form(int n) {
  Matrix w = Matrix::Zero(4 * n, 4 * n);
  w.topLeftCorner(2 * n, 2 * n) = standard_form(n);
  w.bottomRightCorner(2 * n, 2 * n) = -standard_form(n);
  return w;
}

double omega(const Vector& u, const Vector& v) {
  const auto n = u.size() / 2;
  return u.head(n).dot(v.tail(n)) - u.tail(n).dot(v.head(n));
}

namespace {

double inf_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

}  // namespace

SymplecticMatrix::SymplecticMatrix(Matrix entries, double tol) : m_(std::move(entries)) {
  if (m_.rows() != m_.cols() || m_.rows() % 2 != 0) {
    throw PreconditionError("symplectic matrix must be square of even dimension");
  }
  if (m_.size() == 0) return;
  const double scale = std::max(1.0, inf_norm(m_) * inf_norm(m_));
  const double defect = symplectic_defect();
  if (defect > tol * scale) {
    std::ostringstream msg;
    msg << "matrix is not symplectic: ||S^T J S - J|| = " << defect;
    throw PreconditionError(msg.str());
  }
  const double det = m_.determinant();
  if (std::abs(det - 1.0) > 1e-8 * std::max(1.0, std::abs(det))) {
    std::ostringstream msg;
    msg << "symplectic matrix has determinant " << det;
    throw PreconditionError(msg.str());
  }
}

SymplecticMatrix SymplecticMatrix::identity(int n) {
  return SymplecticMatrix(Matrix::Identity(2 * n, 2 * n), Unchecked{});
}

double SymplecticMatrix::symplectic_defect() const {
  if (m_.size() == 0) return 0.0;
  const Matrix j = standard_form(degrees_of_freedom());
  return inf_norm(m_.transpose() * j * m_ - j);
}

SymplecticMatrix SymplecticMatrix::inverse() const {
  if (empty()) return *this;
  const Matrix j = standard_form(degrees_of_freedom());
  return SymplecticMatrix(Matrix(-j * m_.transpose() * j), Unchecked{});
}

SymplecticMatrix SymplecticMatrix::power(int k) const {
  if (empty()) return *this;
  Matrix base = k >= 0 ? m_ : inverse().m_;
  Matrix result = Matrix::Identity(dim(), dim());
  for (unsigned e = static_cast<unsigned>(std::abs(k)); e != 0; e >>= 1) {
    if (e & 1u) result = result * base;
    base = base * base;
  }
  return SymplecticMatrix(std::move(result), Unchecked{});
}

SymplecticMatrix SymplecticMatrix::operator*(const SymplecticMatrix& other) const {
  if (dim() != other.dim()) throw PreconditionError("symplectic dimension mismatch");
  return SymplecticMatrix(Matrix(m_ * other.m_), Unchecked{});
}

Signature signature(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) throw PreconditionError("signature: matrix is not square");
  Signature s;
  if (m.size() == 0) return s;
  const double asym = inf_norm(m - m.transpose());
  if (asym > tol * std::max(1.0, inf_norm(m))) {
    std::ostringstream msg;
    msg << "signature: matrix is not symmetric (residual " << asym << ")";
    throw PreconditionError(msg.str());
  }
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(sym, Eigen::EigenvaluesOnly);
  const Vector& mu = eig.eigenvalues();
  const double cut = tol * mu.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu[i] > cut) {
      ++s.plus;
    } else if (mu[i] < -cut) {
      ++s.minus;
    } else {
      ++s.zero;
    }
  }
  return s;
}

LagrangianFrame::LagrangianFrame(Matrix basis)
    : LagrangianFrame(basis, standard_form(static_cast<int>(basis.rows() / 2))) {}

LagrangianFrame::LagrangianFrame(Matrix basis, Matrix form, double iso_tol)
    : basis_(std::move(basis)), form_(std::move(form)) {
  const auto ambient = basis_.rows();
  if (ambient % 2 != 0 || basis_.cols() * 2 != ambient) {
    throw PreconditionError("Lagrangian frame must be a 2N x N basis");
  }
  if (form_.rows() != ambient || form_.cols() != ambient) {
    throw PreconditionError("Lagrangian frame: form has wrong dimension");
  }
  if (ambient == 0) return;
  const double scale = inf_norm(basis_) * inf_norm(basis_);
  const double iso = inf_norm(basis_.transpose() * form_ * basis_);
  if (iso > iso_tol * scale) {
    std::ostringstream msg;
    msg << "frame is not isotropic: ||B^T w B|| = " << iso;
    throw PreconditionError(msg.str());
  }
  Eigen::JacobiSVD<Matrix> svd(basis_);
  const Vector& sv = svd.singularValues();
  if (sv.minCoeff() < 1e-8 * sv.maxCoeff()) {
    throw PreconditionError("Lagrangian frame basis is rank deficient");
  }
}

LagrangianFrame LagrangianFrame::transformed(const Matrix& t) const {
  return LagrangianFrame(t * basis_, form_);
}

Matrix LagrangianFrame::orthonormal_basis() const {
  Eigen::HouseholderQR<Matrix> qr(basis_);
  return qr.householderQ() * Matrix::Identity(basis_.rows(), basis_.cols());
}

Matrix hk_gram(const LagrangianFrame& l1, const LagrangianFrame& l2,
               const LagrangianFrame& l3) {
  if (l1.ambient_dim() != l2.ambient_dim() || l1.ambient_dim() != l3.ambient_dim()) {
    throw PreconditionError("hk_index: frames live in different dimensions");
  }
  if (!l1.form().isApprox(l2.form()) || !l1.form().isApprox(l3.form())) {
    throw PreconditionError("hk_index: frames carry different symplectic forms");
  }
  const Matrix& w = l1.form();
  const int n = l1.dim();
  const Matrix w12 = l1.basis().transpose() * w * l2.basis();
  const Matrix w23 = l2.basis().transpose() * w * l3.basis();
  const Matrix w31 = l3.basis().transpose() * w * l1.basis();
  Matrix g = Matrix::Zero(3 * n, 3 * n);
  g.block(0, n, n, n) = 0.5 * w12;
  g.block(n, 0, n, n) = 0.5 * w12.transpose();
  g.block(n, 2 * n, n, n) = 0.5 * w23;
  g.block(2 * n, n, n, n) = 0.5 * w23.transpose();
  g.block(2 * n, 0, n, n) = 0.5 * w31;
  g.block(0, 2 * n, n, n) = 0.5 * w31.transpose();
  return g;
}

int hk_index(const LagrangianFrame& l1, const LagrangianFrame& l2,
             const LagrangianFrame& l3, double tol) {
  // The form is invariant under a change of basis inside each subspace, so
  // orthonormal bases keep the eigenvalue scale (and the zero threshold) honest.
  // Inputs were validated on construction; skip re-validation of round-off.
  const LagrangianFrame o1(l1.orthonormal_basis(), l1.form(), 1.0);
  const LagrangianFrame o2(l2.orthonormal_basis(), l2.form(), 1.0);
  const LagrangianFrame o3(l3.orthonormal_basis(), l3.form(), 1.0);
  return signature(hk_gram(o1, o2, o3), tol).value();
}

LagrangianFrame graph_lagrangian(const Matrix& s, double iso_tol) {
  const auto d = s.rows();
  Matrix basis(2 * d, d);
  basis.topRows(d) = s;
  basis.bottomRows(d) = Matrix::Identity(d, d);
  return LagrangianFrame(std::move(basis), doubled_form(static_cast<int>(d / 2)), iso_tol);
}

LagrangianFrame graph_lagrangian(const SymplecticMatrix& s) {
  return graph_lagrangian(s.matrix());
}

LagrangianFrame diagonal_lagrangian(int n) {
  return graph_lagrangian(Matrix(Matrix::Identity(2 * n, 2 * n)));
}

LagrangianFrame mixed_lagrangian(int n) {
  // (x, xi, y, eta) with x = eta = 0.
  Matrix basis = Matrix::Zero(4 * n, 2 * n);
  basis.block(n, 0, n, n) = Matrix::Identity(n, n);
  basis.block(2 * n, n, n, n) = Matrix::Identity(n, n);
  return LagrangianFrame(std::move(basis), doubled_form(n));
}

QuadraticPhase::QuadraticPhase(Matrix alpha, Matrix beta, Matrix gamma, double value)
    : xx(std::move(alpha)), xeta(std::move(beta)), etaeta(std::move(gamma)), value0(value) {
  const auto n = xx.rows();
  if (xx.cols() != n || xeta.rows() != n || xeta.cols() != n || etaeta.rows() != n ||
      etaeta.cols() != n) {
    throw PreconditionError("quadratic phase blocks must be n x n");
  }
  if (xx != xx.transpose() || etaeta != etaeta.transpose()) {
    throw PreconditionError("phi''_xx and phi''_{eta eta} must be symmetric");
  }
}

double QuadraticPhase::operator()(const Vector& x, const Vector& eta) const {
  return value0 + 0.5 * x.dot(xx * x) + x.dot(xeta * eta) + 0.5 * eta.dot(etaeta * eta);
}

Matrix QuadraticPhase::bordered_hessian() const {
  const auto n = xx.rows();
  Matrix h(2 * n, 2 * n);
  h.topLeftCorner(n, n) = xx;
  h.topRightCorner(n, n) = xeta - Matrix::Identity(n, n);
  h.bottomLeftCorner(n, n) = xeta.transpose() - Matrix::Identity(n, n);
  h.bottomRightCorner(n, n) = etaeta;
  return h;
}

SymplecticMatrix dkappa_from_phase(const QuadraticPhase& phase) {
  const auto n = phase.n();
  const Matrix& alpha = phase.xx;
  const Matrix& gamma = phase.etaeta;
  const Matrix beta_t = phase.xeta.transpose();  // phi''_{eta x}
  if (std::abs(beta_t.determinant()) < 1e-8) {
    throw PreconditionError("phase not graph-like: det phi''_{x eta} = 0");
  }
  const Matrix inv = beta_t.inverse();
  Matrix dk(2 * n, 2 * n);
  dk.topLeftCorner(n, n) = inv;
  dk.topRightCorner(n, n) = -inv * gamma;
  dk.bottomLeftCorner(n, n) = alpha * inv;
  dk.bottomRightCorner(n, n) = phase.xeta - alpha * inv * gamma;
  // Round-off of the inverse scales with the condition number of beta.
  const double cond = inv.cwiseAbs().maxCoeff() * std::max(1.0, beta_t.cwiseAbs().maxCoeff());
  return SymplecticMatrix(std::move(dk), 1e-10 * std::max(1.0, cond));
}

Matrix random_symmetric(int n, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Matrix a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) a(i, j) = a(j, i) = u(rng);
  }
  return a;
}

SymplecticMatrix random_symplectic(int n, std::mt19937_64& rng, double scale) {
  const Matrix k = standard_form(n) * random_symmetric(2 * n, rng, scale);
  Matrix s = k.exp();
  return SymplecticMatrix(std::move(s), 1e-9);
}

LagrangianFrame random_lagrangian(int n, std::mt19937_64& rng) {
  Matrix basis(2 * n, n);
  basis.topRows(n) = Matrix::Identity(n, n);
  basis.bottomRows(n) = random_symmetric(n, rng);
  return LagrangianFrame(random_symplectic(n, rng).matrix() * basis);
}

}  // namespace semitrace
