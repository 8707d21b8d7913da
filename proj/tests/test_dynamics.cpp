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

#include <cmath>
#include <random>

#include "semitrace/dynamics.hpp"
#include "semitrace/orbit.hpp"

using namespace semitrace;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<int>(v.size()));
  int i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Matrix rotation(double theta) {
  Matrix r(2, 2);
  r << std::cos(theta), std::sin(theta), -std::sin(theta), std::cos(theta);
  return r;
}

ClosedOrbit x1_mode(double z = 1.0, int N = 1) {
  const auto sys = anisotropic_oscillator(1.0, std::sqrt(2.0));
  const Vector guess = vec({std::sqrt(2.0 * z), 0, 0, 0});
  return find_closed_orbit(sys, z, guess, SectionSpec::orthogonal(sys, z, guess), N);
}

}  // namespace

TEST_CASE("flow of the 1D oscillator is a rotation of period pi") {
  const auto sys = well_system(harmonic_potential());
  const double tol = 1e-11;
  const auto r = integrate_flow(sys, 1.0, vec({1, 0}), kPi, tol);
  CHECK((r.point - vec({1, 0})).norm() <= 10 * tol);
  CHECK((r.variational - Matrix::Identity(2, 2)).norm() <= 10 * tol);

  const auto zero = integrate_flow(sys, 1.0, vec({0.3, -0.2}), 0.0, tol);
  CHECK(zero.point == vec({0.3, -0.2}));
  CHECK(zero.variational == Matrix::Identity(2, 2));

  // Backwards in time.
  const auto back = integrate_flow(sys, 1.0, vec({1, 0}), -kPi / 4, tol);
  CHECK((back.point - vec({0, 1})).norm() <= 10 * tol);
}

TEST_CASE("energy is conserved and the variational matrix stays symplectic") {
  const auto sys = coupled_quartic(1.0, 1.3, 0.4);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double tol = 1e-10;
  for (int trial = 0; trial < 10; ++trial) {
    const Vector m = vec({u(rng), u(rng), u(rng), u(rng)});
    const double t = 3.0 + 2.0 * u(rng);
    const auto r = integrate_flow(sys, 0.0, m, t, tol);
    CHECK(std::abs(sys.p(r.point, 0.0) - sys.p(m, 0.0)) <= 10 * tol * std::abs(t));
    const Matrix j = standard_form(2);
    CHECK((r.variational.transpose() * j * r.variational - j).lpNorm<Eigen::Infinity>() <=
          100 * tol);
  }
}

TEST_CASE("sample_flow agrees with integrate_flow") {
  const auto sys = coupled_quartic(1.0, 1.3, 0.4);
  const Vector m = vec({0.5, 0.2, 0.1, -0.3});
  const auto s = sample_flow(sys, 0.0, m, {0.5, 1.0, 2.5}, 1e-11);
  REQUIRE(s.size() == 3);
  CHECK((s[2].point - integrate_flow(sys, 0.0, m, 2.5, 1e-11).point).norm() < 1e-9);
  CHECK(s[1].time == doctest::Approx(1.0));
}

TEST_CASE("derivative self-check rejects inconsistent systems") {
  CHECK_THROWS_AS(HamiltonianSystem(
                      "bad", 1, [](const Vector& m, double) { return m(0) * m(0) + m(1) * m(1); },
                      [](const Vector& m, double) { return Vector(2 * m); },
                      [](const Vector&, double) { return Matrix(Matrix::Identity(2, 2)); },
                      [](const Vector&, double) { return -1.0; }),
                  PreconditionError);
}

TEST_CASE("first_return of the 1D oscillator") {
  const auto sys = well_system(harmonic_potential());
  const Vector m = vec({1, 0});
  const auto r = first_return(sys, 1.0, m, m, vec({0, -1}), 0.1, 20.0, 1e-12);
  CHECK(r.time == doctest::Approx(kPi).epsilon(1e-10));
  CHECK_THROWS_AS(first_return(sys, 1.0, m, m, vec({0, -1}), 0.1, 2.0, 1e-12), NumericalError);
}

TEST_CASE("x1 normal mode of the anisotropic oscillator") {
  const auto orbit = x1_mode();
  CHECK(orbit.period() == doctest::Approx(kTwoPi).epsilon(1e-10));
  CHECK(orbit.action() == doctest::Approx(kTwoPi).epsilon(1e-10));
  CHECK(orbit.residual() <= 1e-9);
  CHECK(orbit.newton_iterations() == 0);

  const Matrix dc = orbit.reduced_monodromy().matrix();
  REQUIRE(dc.rows() == 2);
  CHECK(dc.trace() == doctest::Approx(2 * std::cos(kTwoPi * std::sqrt(2.0))).epsilon(1e-8));
  CHECK(dc.determinant() == doctest::Approx(1.0).epsilon(1e-10));
  // Conjugate to the rotation by 2 pi sqrt 2: same spectrum and elliptic.
  Eigen::EigenSolver<Matrix> es(dc);
  for (int i = 0; i < 2; ++i) CHECK(std::abs(std::abs(es.eigenvalues()(i)) - 1.0) < 1e-8);

  // Action scales with energy.
  const auto orbit2 = x1_mode(2.0);
  CHECK(orbit2.action() == doctest::Approx(2 * kTwoPi).epsilon(1e-10));
  CHECK(orbit_action(orbit2, 512) == doctest::Approx(orbit2.action()).epsilon(1e-10));
  CHECK(std::abs(orbit_action(orbit2, 512) - orbit_action(orbit2, 256)) <= 1e-10);
}

TEST_CASE("perturbed guess recovers the same orbit") {
  const auto sys = anisotropic_oscillator(1.0, std::sqrt(2.0));
  const double z = 1.0;
  const Vector exact = vec({std::sqrt(2.0), 0, 0, 0});
  const Vector guess = exact + vec({0.01, -0.01, 0.01, 0.01});
  const auto orbit = find_closed_orbit(sys, z, guess, SectionSpec::orthogonal(sys, z, guess), 1);
  CHECK(orbit.newton_iterations() > 0);
  const Vector m = orbit.point();
  // On the x1 mode: x2 = xi2 = 0 and x1^2 + xi1^2 = 2 z.
  CHECK(std::abs(m(1)) <= 1e-7);
  CHECK(std::abs(m(3)) <= 1e-7);
  CHECK(std::abs(m(0) * m(0) + m(2) * m(2) - 2 * z) <= 1e-7);
  CHECK(orbit.period() == doctest::Approx(kTwoPi).epsilon(1e-9));
  // Phase alignment: the point on the exact orbit with the same angle.
  const double phase = std::atan2(-m(2), m(0));
  const Vector aligned = vec({std::sqrt(2.0) * std::cos(phase), 0, -std::sqrt(2.0) * std::sin(phase), 0});
  CHECK((m - aligned).norm() <= 1e-7);
}

TEST_CASE("a non-transversal section is rejected") {
  const auto sys = anisotropic_oscillator(1.0, std::sqrt(2.0));
  const Vector m = vec({std::sqrt(2.0), 0, 0, 0});
  SectionSpec s{m, vec({1, 0, 0, 0})};
  CHECK_THROWS_AS(find_closed_orbit(sys, 1.0, m, s, 1), PreconditionError);
}

TEST_CASE("1D wells: action is the enclosed area and dC is empty") {
  const auto sys = well_system(harmonic_potential());
  const double e = 1.5;
  const Vector guess = vec({std::sqrt(e), 0});
  const auto orbit = find_closed_orbit(sys, e, guess, SectionSpec::orthogonal(sys, e, guess), 2);
  CHECK(orbit.action() == doctest::Approx(kPi * e).epsilon(1e-10));
  CHECK(orbit.period() == doctest::Approx(kPi).epsilon(1e-10));
  CHECK(orbit.reduced_monodromy().empty());
  const auto nd = check_nondegeneracy(orbit.reduced_monodromy(), 2, 1e-3);
  for (const auto& entry : nd) {
    CHECK(entry.det == 1.0);
    CHECK(entry.pass);
  }
  CHECK(orbit.turning_points() == 2);
  CHECK(orbit.maslov(1) == -2);
  CHECK(orbit.maslov(-1) == 2);
}

TEST_CASE("dI/dz equals the period with second-order central differences") {
  const auto sys = well_system(quartic_potential());
  const double z = 1.0;
  auto orbit_at = [&](double e) {
    const Vector g = vec({std::pow(e, 0.25), 0});
    return find_closed_orbit(sys, e, g, SectionSpec::orthogonal(sys, e, g), 1);
  };
  const double t = orbit_at(z).period();
  auto err = [&](double delta) {
    return std::abs((orbit_at(z + delta).action() - orbit_at(z - delta).action()) / (2 * delta) - t);
  };
  const double e1 = err(1e-3), e2 = err(5e-4);
  const double slope = std::log(e1 / e2) / std::log(2.0);
  CHECK(std::abs(slope - 2.0) <= 0.3);
}

TEST_CASE("nondegeneracy determinants") {
  const double theta = 0.7;
  const auto nd = check_nondegeneracy(SymplecticMatrix(rotation(theta)), 3, 1e-3);
  for (const auto& entry : nd) {
    const double s = std::sin(entry.k * theta / 2);
    CHECK(entry.det == doctest::Approx(4 * s * s).epsilon(1e-12));
  }
  for (const auto& entry :
       check_nondegeneracy(SymplecticMatrix(rotation(kTwoPi * std::sqrt(2.0))), 4, 1e-3))
    CHECK(entry.pass);
  const auto res = check_nondegeneracy(SymplecticMatrix(rotation(kPi)), 2, 1e-3);
  for (const auto& entry : res) CHECK(entry.pass == (std::abs(entry.k) == 1));
}

TEST_CASE("reduced monodromy eigenvalues pair as lambda, 1/lambda") {
  const auto sys = coupled_quartic(1.0, std::sqrt(2.0), 0.3);
  const double z = 1.0;
  const Vector g = vec({std::sqrt(2.0), 0, 0, 0});
  const auto orbit = find_closed_orbit(sys, z, g, SectionSpec::orthogonal(sys, z, g), 1);
  Eigen::EigenSolver<Matrix> es(orbit.reduced_monodromy().matrix());
  const auto ev = es.eigenvalues();
  CHECK(std::abs(ev(0) * ev(1) - 1.0) <= 1e-8);
  // Full monodromy carries the eigenvalue 1 twice (flow and energy directions).
  Eigen::EigenSolver<Matrix> full(orbit.monodromy().matrix());
  int near_one = 0;
  for (int i = 0; i < 4; ++i) near_one += std::abs(full.eigenvalues()(i) - 1.0) < 1e-4;
  CHECK(near_one == 2);
}

TEST_CASE("dC does not depend on the section") {
  const auto sys = coupled_quartic(1.0, std::sqrt(2.0), 0.3);
  const double z = 1.0;
  const Vector g = vec({std::sqrt(2.0), 0, 0, 0});
  const auto orbit = find_closed_orbit(sys, z, g, SectionSpec::orthogonal(sys, z, g), 1);
  SectionSpec tilted{orbit.point(), vec({0.2, 0.5, -1.0, 0.3})};
  const auto a = check_nondegeneracy(orbit.reduced_monodromy(), 3, 1e-3);
  const auto b = check_nondegeneracy(reduce_monodromy(orbit, tilted), 3, 1e-3);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(std::abs(a[i].det - b[i].det) <= 1e-6 * std::max(1.0, std::abs(a[i].det)));
}

TEST_CASE("orbit Maslov indices of the x1 mode") {
  const auto orbit = x1_mode(1.0, 2);
  // Transverse rotation by 2 pi sqrt 2 (one full turn plus a partial one) and two turning points.
  CHECK(orbit_transverse_maslov(orbit, 1) == -3);
  CHECK(orbit.turning_points() == 2);
  CHECK(((orbit.maslov(1) % 4) + 4) % 4 == 3);
  CHECK(((orbit.maslov(-1) % 4) + 4) % 4 == 1);
  for (int k : {1, 2}) CHECK(orbit.maslov(-k) == -orbit.maslov(k));
}
