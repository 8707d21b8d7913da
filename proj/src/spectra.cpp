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


#include "semitrace/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace semitrace {

namespace {

// Outermost point where V reaches e, scanning from 0 in direction dir.
double turning_point(const Potential& v, double e, double dir) {
  if (v(0.0) >= e) throw PreconditionError("schrodinger_1d: V(0) must lie below the energy window");
  double x = 0.0, step = 1e-3;
  while (v(x) < e) {
    x += dir * step;
    step *= 1.05;
    if (std::abs(x) > 1e6) throw PreconditionError("schrodinger_1d: potential is not confining");
  }
  return x;
}

// Tunnelling exponent int sqrt(V - e) dx from the turning point xt to x.
double tunnelling(const Potential& v, double e, double xt, double x) {
  const int n = 400;
  double s = 0.0;
  const double dx = (x - xt) / n;
  for (int i = 0; i < n; ++i) {
    const double y = xt + (i + 0.5) * dx;
    s += std::sqrt(std::max(0.0, v(y) - e)) * std::abs(dx);
  }
  return s;
}

bool is_hermitian(const Matrix& m) {
  return (m - m.transpose()).lpNorm<Eigen::Infinity>() <= 1e-12 * std::max(1.0, m.lpNorm<Eigen::Infinity>());
}

}  // namespace

SpectralModel SpectralModel::circle(double h, int truncation) {
  SpectralModel m;
  m.kind = ModelKind::circle_translation;
  m.h = h;
  m.truncation = truncation;
  return m;
}

SpectralModel SpectralModel::schrodinger(Potential v, double h, double e_max, int grid) {
  SpectralModel m;
  m.kind = ModelKind::schrodinger_1d;
  m.potential = std::move(v);
  m.h = h;
  m.e_max = e_max;
  m.truncation = grid;
  return m;
}

SpectralModel SpectralModel::oscillator(double w1, double w2, double h, double e_max) {
  SpectralModel m;
  m.kind = ModelKind::oscillator_2d;
  m.w1 = w1;
  m.w2 = w2;
  m.h = h;
  m.e_max = e_max;
  return m;
}

SchrodingerGrid schrodinger_grid(const SpectralModel& model) {
  const auto& v = model.potential;
  const double e = model.e_max;
  double l = model.half_width;
  if (l <= 0.0) {
    const double xp = turning_point(v, e, 1.0), xm = turning_point(v, e, -1.0);
    l = 1.5 * std::max(xp, -xm);
    // Widen until the eigenfunctions at e_max have decayed by e^{-18} at the walls.
    while (tunnelling(v, e, xp, l) < 18.0 * model.h || tunnelling(v, e, xm, -l) < 18.0 * model.h)
      l *= 1.1;
  }
  const double vmax = std::max({v(l), v(-l), e});
  // Grid momenta must cover twice the largest classical momentum in the box.
  const int required = 2 * static_cast<int>(std::ceil(2.0 * std::sqrt(vmax) * l / (kPi * model.h)));
  int n = model.truncation > 0 ? model.truncation : required;
  if (n % 2) ++n;
  const double dx = 2.0 * l / n;
  const double reliable = std::min({v(l), v(-l), std::pow(model.h * kPi / dx, 2) / 4.0});
  if (e > 0.9 * reliable) {
    std::ostringstream os;
    os << "schrodinger_1d: energy " << e << " not resolved (reliable up to " << 0.9 * reliable
       << "); need at least " << required << " grid points";
    throw PreconditionError(os.str());
  }
  return {l, n};
}

Matrix model_hamiltonian(const SpectralModel& model) {
  if (model.kind != ModelKind::schrodinger_1d)
    throw PreconditionError("model_hamiltonian: only schrodinger_1d models carry a matrix");
  const auto g = schrodinger_grid(model);
  const int n = g.points;
  const double dx = 2.0 * g.half_width / n;
  const double dk = kTwoPi / (n * dx);
  // Kinetic kernel c(m) = (1/n) sum_l (h k_l)^2 cos(k_l m dx), Nyquist mode split evenly.
  std::vector<double> c(n, 0.0);
  for (int m = 0; m < n; ++m) {
    double s = 0.0;
    for (int l = -n / 2; l <= n / 2; ++l) {
      const double w = (std::abs(l) == n / 2) ? 0.5 : 1.0;
      const double k = l * dk;
      s += w * model.h * model.h * k * k * std::cos(k * m * dx);
    }
    c[m] = s / n;
  }
  Matrix hm(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) hm(i, j) = c[std::abs(i - j)];
  for (int i = 0; i < n; ++i) hm(i, i) += model.potential(-g.half_width + i * dx);
  return hm;
}

Spectrum model_spectrum(const SpectralModel& model) {
  if (!(model.h > 0.0)) throw PreconditionError("model: h must be positive");
  Spectrum s;
  switch (model.kind) {
    case ModelKind::circle_translation: {
      if (model.truncation < 1) throw PreconditionError("circle: truncation must be positive");
      for (int n = -model.truncation; n <= model.truncation; ++n) s.values.push_back(model.h * n);
      s.complete_lo = -model.h * model.truncation;
      s.complete_hi = model.h * model.truncation;
      break;
    }
    case ModelKind::oscillator_2d: {
      if (!(model.w1 > 0.0 && model.w2 > 0.0)) throw PreconditionError("oscillator: frequencies must be positive");
      for (int n = 0; model.h * model.w1 * (n + 0.5) <= model.e_max; ++n)
        for (int m = 0;; ++m) {
          const double e = model.h * (model.w1 * (n + 0.5) + model.w2 * (m + 0.5));
          if (e > model.e_max) break;
          s.values.push_back(e);
        }
      std::sort(s.values.begin(), s.values.end());
      s.complete_hi = model.e_max;
      break;
    }
    case ModelKind::schrodinger_1d: {
      const Matrix hm = model_hamiltonian(model);
      if (!is_hermitian(hm)) throw NumericalError("schrodinger_1d: discretization is not Hermitian");
      Eigen::SelfAdjointEigenSolver<Matrix> es(hm, Eigen::EigenvaluesOnly);
      for (int i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()(i) <= model.e_max) s.values.push_back(es.eigenvalues()(i));
      s.complete_hi = model.e_max;
      break;
    }
  }
  return s;
}

Complex spectral_trace(const Spectrum& spectrum, const TestFunction& f, const EnergyWindow& chi,
                       double h, double z_ref) {
  if (chi.is_zero()) return 0.0;
  const auto [lo, hi] = chi.support();
  if (lo < spectrum.complete_lo || hi > spectrum.complete_hi) {
    std::ostringstream os;
    os << "spectral_trace: spectrum complete only on [" << spectrum.complete_lo << ", "
       << spectrum.complete_hi << "], window support is [" << lo << ", " << hi << "]";
    throw PreconditionError(os.str());
  }
  Complex sum = 0.0;
  for (double e : spectrum.values) {
    const double c = chi(e);
    if (c != 0.0) sum += f((e - z_ref) / h) * c;
  }
  return sum;
}

double resolvent_norm(const ComplexMatrix& a, Complex z) {
  if (z.imag() == 0.0) throw PreconditionError("resolvent_norm: Im z must be nonzero");
  const ComplexMatrix shifted = a - z * ComplexMatrix::Identity(a.rows(), a.cols());
  Eigen::JacobiSVD<ComplexMatrix> svd(shifted);
  return 1.0 / svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace semitrace
