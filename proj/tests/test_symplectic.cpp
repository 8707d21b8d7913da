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

#include "doctest.h"

#include <random>

#include "semitrace/maslov.hpp"
#include "semitrace/symplectic.hpp"

using namespace semitrace;

namespace {

Matrix line(double a, double b) {
  Matrix m(2, 1);
  m << a, b;
  return m;
}

Matrix rotation(double theta) {
  Matrix r(2, 2);
  r << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  return r;
}

QuadraticPhase random_phase(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix beta;
  do {
    beta = Matrix::NullaryExpr(n, n, [&] { return u(rng); });
  } while (std::abs(beta.determinant()) < 0.1);
  return QuadraticPhase(random_symmetric(n, rng), beta, random_symmetric(n, rng));
}

}  // namespace

TEST_CASE("signature read-off") {
  CHECK(signature(Matrix::Identity(3, 3), 1e-9).plus == 3);
  const auto z = signature(Matrix::Zero(2, 2));
  CHECK(z.zero == 2);
  CHECK(z.value() == 0);
  Matrix d = Eigen::Vector3d(2.0, -1.0, 0.0).asDiagonal();
  const auto s = signature(d, 1e-9);
  CHECK(s.plus == 1);
  CHECK(s.minus == 1);
  CHECK(s.zero == 1);
  Matrix asym(2, 2);
  asym << 0, 1, 0, 0;
  CHECK_THROWS_AS(signature(asym), PreconditionError);
}

TEST_CASE("HK index of x-axis, diagonal line, xi-axis") {
  const LagrangianFrame x_axis(line(1, 0));
  const LagrangianFrame diag(line(1, 1));
  const LagrangianFrame xi_axis(line(0, 1));
  // Q(a, b, c) = ab + bc - ca has signature +1 with omega = dx ^ dxi.
  CHECK(hk_index(x_axis, diag, xi_axis) == 1);
  CHECK(hk_index(diag, x_axis, xi_axis) == -1);
  CHECK(hk_index(x_axis, x_axis, xi_axis) == 0);
  CHECK(hk_index(diag, diag, LagrangianFrame(line(0.3, -2.0))) == 0);
}

TEST_CASE("HK antisymmetry, cocycle and symplectic invariance") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 3;
    const auto l1 = random_lagrangian(n, rng);
    const auto l2 = random_lagrangian(n, rng);
    const auto l3 = random_lagrangian(n, rng);
    const auto l4 = random_lagrangian(n, rng);
    const int s = hk_index(l1, l2, l3);
    CHECK(hk_index(l2, l1, l3) == -s);
    CHECK(hk_index(l1, l3, l2) == -s);
    CHECK(hk_index(l3, l2, l1) == -s);
    CHECK(hk_index(l2, l3, l1) == s);
    CHECK(hk_index(l3, l1, l2) == s);
    CHECK(hk_index(l2, l3, l4) - hk_index(l1, l3, l4) + hk_index(l1, l2, l4) -
              hk_index(l1, l2, l3) ==
          0);
    const Matrix t = random_symplectic(n, rng).matrix();
    CHECK(hk_index(l1.transformed(t), l2.transformed(t), l3.transformed(t)) == s);
  }
}

TEST_CASE("graph Lagrangians") {
  const auto delta = graph_lagrangian(SymplecticMatrix::identity(1));
  CHECK(delta.basis().topRows(2).isApprox(delta.basis().bottomRows(2)));
  const auto gj = graph_lagrangian(SymplecticMatrix(standard_form(1)));
  CHECK((gj.basis().transpose() * doubled_form(1) * gj.basis()).norm() < 1e-14);
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    CHECK_NOTHROW(graph_lagrangian(random_symplectic(1, rng)));
  }
}

TEST_CASE("dkappa from a quadratic phase") {
  const Matrix one = Matrix::Identity(1, 1);
  const Matrix zero = Matrix::Zero(1, 1);
  CHECK(dkappa_from_phase(QuadraticPhase(zero, one, zero)).matrix().isApprox(
      Matrix::Identity(2, 2)));

  SUBCASE("finite differences of (phi'_eta, eta) -> (x, phi'_x)") {
    // phi = x eta + (x^2 + eta^2)/2: the map is (x + eta, eta) -> (x, x + eta).
    // Invert the source chart: given (y, eta), x = y - eta.
    auto kappa = [](double y, double eta) {
      const double x = y - eta;
      return Eigen::Vector2d(x, x + eta);
    };
    const double d = 1e-5;
    Matrix fd(2, 2);
    fd.col(0) = (kappa(d, 0) - kappa(-d, 0)) / (2 * d);
    fd.col(1) = (kappa(0, d) - kappa(0, -d)) / (2 * d);
    const auto dk = dkappa_from_phase(QuadraticPhase(one, one, one));
    CHECK((dk.matrix() - fd).cwiseAbs().maxCoeff() < 1e-6);
  }

  CHECK_THROWS_AS(dkappa_from_phase(QuadraticPhase(one, zero, one)), PreconditionError);

  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const auto phase = random_phase(1 + i % 3, rng);
    const auto dk = dkappa_from_phase(phase);
    CHECK(dk.symplectic_defect() <= 1e-10 * std::max(1.0, dk.matrix().squaredNorm()));
  }
}

TEST_CASE("determinant factorization and HK signature identity") {
  std::mt19937_64 rng(19);
  int checked = 0;
  for (int i = 0; i < 200 && checked < 100; ++i) {
    const int n = 1 + i % 3;
    const auto phase = random_phase(n, rng);
    const Matrix omega_b = phase.bordered_hessian();
    const double lhs =
        (dkappa_from_phase(phase).matrix() - Matrix::Identity(2 * n, 2 * n)).determinant() *
        phase.xeta.determinant();
    const double rhs = omega_b.determinant();
    CHECK(std::abs(lhs - rhs) <= 1e-8 * std::max(std::abs(rhs), 1.0));
    if (std::abs(rhs) < 1e-3) continue;
    ++checked;
    const int s = hk_index(graph_lagrangian(dkappa_from_phase(phase)), diagonal_lagrangian(n),
                           mixed_lagrangian(n));
    CHECK(s == -signature(omega_b).value());
  }
  CHECK(checked == 100);
}
