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

#include "semitrace/functional_calculus.hpp"
#include "semitrace/quadrature.hpp"
#include "semitrace/spectra.hpp"
#include "semitrace/test_function.hpp"
#include "semitrace/weyl.hpp"

using namespace semitrace;

namespace {

double bump(double s) { return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0; }

ComplexMatrix random_hermitian(int n, std::mt19937_64& rng, double scale) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(u(rng), u(rng));
  return scale * 0.5 * (a + a.adjoint()) / std::sqrt(static_cast<double>(n));
}

}  // namespace

TEST_CASE("test function Fourier round trip") {
  const auto f = TestFunction::bump(2.0, 1.0, Complex(0.7, -0.2)) + TestFunction::bump(-1.0, 0.5);
  for (double t : {-1.2, -0.8, 1.5, 2.0, 2.7}) {
    const Complex back = integrate_composite(
        [&](double lam) { return f(lam) * std::polar(1.0, -lam * t); }, -400.0, 400.0, 800);
    CHECK(std::abs(back - f.fhat(t)) <= 1e-6);
  }
  CHECK(f.fhat(2.0) == Complex(0.7, -0.2));
  CHECK_FALSE(f.is_real());
  CHECK(TestFunction::real_pair(3.0, 1.0, Complex(0.3, 0.4)).is_real());
  CHECK(std::abs(TestFunction::real_pair(3.0, 1.0, Complex(0.3, 0.4))(1.7).imag()) < 1e-15);
}

TEST_CASE("test function decays faster than any power") {
  const auto f = TestFunction::bump(kTwoPi, 1.0);
  // C_6 = sup |f(lambda)| (1 + |lambda|)^6 is attained at moderate |lambda|.
  auto weighted_sup = [&](double lo, double hi) {
    double s = 0.0;
    for (double lam = lo; lam <= hi; lam += 0.5) s = std::max(s, std::abs(f(lam)) * std::pow(1.0 + std::abs(lam), 6));
    return s;
  };
  const double head = weighted_sup(-300.0, 300.0);
  CHECK(weighted_sup(300.0, 1000.0) < head);
  CHECK(weighted_sup(-1000.0, -300.0) < head);
}

TEST_CASE("energy window shape") {
  const auto chi = EnergyWindow(1.0, 2.0, 0.5);
  CHECK(chi(1.5) == 1.0);
  CHECK(chi(1.0) == 1.0);
  CHECK(chi(0.5) == 0.0);
  CHECK(chi(2.6) == 0.0);
  for (double e = 0.0; e < 3.0; e += 0.01) {
    CHECK(chi(e) >= 0.0);
    CHECK(chi(e) <= 1.0);
  }
  const double e = 0.8, d = 1e-6;
  CHECK(chi.derivative(e) == doctest::Approx((chi(e + d) - chi(e - d)) / (2 * d)).epsilon(1e-6));
  CHECK(EnergyWindow::zero()(1.0) == 0.0);
}

TEST_CASE("model spectra") {
  const auto c = model_spectrum(SpectralModel::circle(0.1, 50));
  REQUIRE(c.values.size() == 101);
  CHECK(c.values.front() == doctest::Approx(-5.0));
  CHECK(c.values[50] == 0.0);

  const double h = 0.01, s2 = std::sqrt(2.0);
  const auto o = model_spectrum(SpectralModel::oscillator(1.0, s2, h, 2.0));
  std::size_t count = 0;
  for (int n = 0; n < 300; ++n)
    for (int m = 0; m < 300; ++m) count += h * (n + 0.5) + h * s2 * (m + 0.5) <= 2.0;
  CHECK(o.values.size() == count);
  CHECK(std::is_sorted(o.values.begin(), o.values.end()));
  CHECK(o.values.front() == doctest::Approx(h * (0.5 + 0.5 * s2)));

  const auto model = SpectralModel::schrodinger(harmonic_potential(), 0.05, 2.2);
  const auto s = model_spectrum(model);
  REQUIRE(s.values.size() >= 20);
  for (int n = 0; n < 20; ++n) CHECK(std::abs(s.values[n] - 2 * 0.05 * (n + 0.5)) <= 1e-6);
  const Matrix hm = model_hamiltonian(model);
  CHECK((hm - hm.transpose()).norm() <= 1e-12 * hm.norm());

  auto coarse = SpectralModel::schrodinger(harmonic_potential(), 0.05, 2.2, 16);
  CHECK_THROWS_AS(model_spectrum(coarse), PreconditionError);
}

TEST_CASE("circle spectral traces follow Poisson summation") {
  const double h = 0.1;
  const auto spec = model_spectrum(SpectralModel::circle(h, 400));
  const auto chi = EnergyWindow(-30.0, 30.0, 3.0);
  const auto f = TestFunction::bump(kTwoPi, kPi / 2);
  CHECK(std::abs(spectral_trace(spec, f, chi, h) - 1.0) <= 1e-8);
  const auto g = TestFunction::bump(1.75, 1.25);
  CHECK(std::abs(spectral_trace(spec, g, chi, h)) <= 1e-8);
  CHECK(spectral_trace(spec, f, EnergyWindow::zero(), h) == 0.0);

  // Linearity in f and in chi.
  const Complex a(0.3, 1.1), b(-0.7, 0.2);
  const auto chi2 = EnergyWindow(-10.0, 5.0, 2.0);
  const Complex lin = spectral_trace(spec, f.scaled(a) + g.scaled(b), chi2, h);
  CHECK(std::abs(lin - a * spectral_trace(spec, f, chi2, h) - b * spectral_trace(spec, g, chi2, h)) <= 1e-12);

  CHECK_THROWS_AS(spectral_trace(spec, f, EnergyWindow(-50.0, 50.0, 1.0), h), PreconditionError);
}

TEST_CASE("almost analytic extension of polynomials is exact") {
  const auto g = SampledFunction::sample([](double x) { return 1.0 - 2.0 * x + 0.5 * x * x * x; }, -2.0, 2.0, 41);
  const AlmostAnalyticExtension ext(g, 3);
  for (Complex z : {Complex(0.3, 0.2), Complex(-1.1, -0.5), Complex(1.7, 0.05)}) {
    const Complex exact = 1.0 - 2.0 * z + 0.5 * z * z * z;
    CHECK(std::abs(ext(z) - exact) <= 1e-9);
    CHECK(std::abs(ext.dbar(z)) <= 1e-8);
  }
}

TEST_CASE("almost analytic extension of a Gaussian: dbar = O(|y|^3)") {
  const auto g = SampledFunction::sample([](double x) { return std::exp(-x * x); }, -6.0, 6.0, 601);
  const AlmostAnalyticExtension ext(g, 3);
  double worst = 0.0;
  for (double x = -2.0; x <= 2.0; x += 0.25)
    for (double y : {0.1, 0.05, 0.02, 0.01, -0.03}) worst = std::max(worst, std::abs(ext.dbar({x, y})) / std::pow(std::abs(y), 3));
  CHECK(worst < 10.0);
  CHECK_THROWS_AS(AlmostAnalyticExtension(g, 10, 12), PreconditionError);
}

TEST_CASE("Helffer-Sjostrand functional calculus") {
  const auto g = SampledFunction::sample([](double x) { return bump(x / 2.0); }, -3.0, 3.0, 601);
  ComplexMatrix zero1 = ComplexMatrix::Zero(1, 1);
  const ComplexMatrix g0 = hs_functional_calculus(zero1, g);
  CHECK(std::abs(g0(0, 0) - 1.0) <= 1e-4);

  // g vanishing near the spectrum.
  const auto off = SampledFunction::sample([](double x) { return bump((x - 2.2) / 1.5); }, -4.0, 4.0, 801);
  ComplexMatrix small = ComplexMatrix::Zero(2, 2);
  small(0, 0) = -0.5;
  small(1, 1) = 0.3;
  HsOptions fine;
  fine.x_nodes = fine.y_nodes = 400;
  // exact answer is 0; what is left is quadrature error
  CHECK(hs_functional_calculus(small, off, fine).norm() <= 2e-5);

  std::mt19937_64 rng(5);
  const ComplexMatrix a = random_hermitian(10, rng, 1.2);
  const auto wide_g = SampledFunction::sample([](double x) { return bump(x / 3.0); }, -3.5, 3.5, 701);
  const ComplexMatrix ref = eig_functional_calculus(a, wide_g);
  std::vector<double> errs;
  for (int order : {1, 2, 3, 4}) {
    HsOptions opt;
    opt.order = order;
    opt.x_nodes = opt.y_nodes = 400;
    errs.push_back((hs_functional_calculus(a, wide_g, opt) - ref).norm());
  }
  MESSAGE("HS errors by order: " << errs[0] << " " << errs[1] << " " << errs[2] << " " << errs[3]);
  CHECK(errs[1] < errs[0]);
  CHECK(errs[2] < errs[1]);
  CHECK(errs[3] < errs[0]);
  for (double e : errs) CHECK(e <= 1e-3);

  ComplexMatrix wide = ComplexMatrix::Zero(1, 1);
  wide(0, 0) = 5.0;
  CHECK_THROWS_AS(hs_functional_calculus(wide, g), PreconditionError);
}

TEST_CASE("resolvent norm") {
  CHECK(resolvent_norm(ComplexMatrix::Zero(1, 1), Complex(0, 1)) == doctest::Approx(1.0));
  ComplexMatrix d = ComplexMatrix::Zero(3, 3);
  d.diagonal() << 1.0, 2.0, 3.0;
  CHECK(resolvent_norm(d, Complex(2.0, 0.5)) == doctest::Approx(2.0));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const ComplexMatrix a = random_hermitian(6, rng, 2.0);
    Complex z(u(rng), u(rng));
    if (z.imag() == 0.0) continue;
    CHECK(resolvent_norm(a, z) <= (1.0 + 1e-12) / std::abs(z.imag()));
  }
  CHECK_THROWS_AS(resolvent_norm(d, Complex(1.0, 0.0)), PreconditionError);
}

TEST_CASE("Weyl quantization on a grid") {
  const WeylGrid grid{-4.0, 4.0, 256};
  const double h = 0.1;
  const ComplexMatrix one = weyl_quantize([](double, double) { return 1.0; }, h, grid, 1.0);
  CHECK((one - ComplexMatrix::Identity(256, 256)).norm() <= 1e-12);

  const auto sym = [](double x, double xi) { return bump(x / 2.0) * bump(xi / 1.5) * (1.0 + x * xi); };
  const ComplexMatrix k = weyl_quantize(sym, h, grid, 1.5);
  CHECK((k - k.adjoint()).norm() <= 1e-10 * k.norm());

  // a = xi w(x) is (h/i)(w d/dx + w'/2)
  auto w = [](double x) { return std::exp(-x * x); };
  auto wp = [](double x) { return -2.0 * x * std::exp(-x * x); };
  auto transport_error = [&](int n) {
    const WeylGrid gr{-4.0, 4.0, n};
    const double hh = 0.05;
    ComplexVector u(n), expected(n);
    for (int j = 0; j < n; ++j) {
      const double x = gr.x(j);
      const double g = std::exp(-4.0 * (x - 0.3) * (x - 0.3)), gp = -8.0 * (x - 0.3) * g;
      u(j) = g;
      expected(j) = Complex(0.0, -hh) * (w(x) * gp + 0.5 * wp(x) * g);
    }
    const ComplexMatrix kxi = weyl_quantize([&](double x, double xi) { return xi * w(x); }, hh, gr, 0.05);
    ComplexVector d = kxi * u - expected;
    // rows near the box edge see the periodic image of u through the far midpoint
    for (int j = 0; j < n; ++j)
      if (std::abs(gr.x(j)) > 2.0) d(j) = 0.0;
    return d.lpNorm<Eigen::Infinity>();
  };
  const double e256 = transport_error(256), e512 = transport_error(512);
  MESSAGE("transport errors " << e256 << " " << e512);
  CHECK(e256 <= 1e-8);
  CHECK(e512 <= e256);

  CHECK_THROWS_AS(weyl_quantize(sym, 0.01, grid, 1.5), PreconditionError);
}

TEST_CASE("Weyl symbols are invariant under changes of variables up to O(h^2)") {
  const WeylGrid grid{-4.0, 4.0, 640};
  const auto a = [](double x, double xi) { return bump(x / 1.2) * std::exp(-4.0 * xi * xi); };
  const Diffeomorphism id{[](double x) { return x; }, [](double) { return 1.0; }, [](double y) { return y; }};
  CHECK(weyl_invariance_residual(a, id, 0.1, grid, 2.7, 2.0) <= 1e-10);

  const Diffeomorphism twice{[](double x) { return 2.0 * x; }, [](double) { return 2.0; },
                             [](double y) { return 0.5 * y; }};
  CHECK(weyl_invariance_residual(a, twice, 0.1, grid, 2.7, 1.5) <= 1e-8);

  // analytic profiles; compactly supported ones stay pre-asymptotic much longer
  const auto g = [](double x, double xi) { return std::exp(-x * x - xi * xi); };
  const Diffeomorphism wiggle{[](double x) { return x + 0.1 * std::exp(-x * x); },
                              [](double x) { return 1.0 - 0.2 * x * std::exp(-x * x); }, {}};
  const double r1 = weyl_invariance_residual(g, wiggle, 0.2, grid, 5.2, 2.5);
  const double r2 = weyl_invariance_residual(g, wiggle, 0.1, grid, 5.2, 2.5);
  MESSAGE("weyl residuals " << r1 << " " << r2);
  CHECK(r1 / r2 >= 3.0);
  CHECK(r1 / r2 <= 5.0);
}
