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


#include "semitrace/functional_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <unsupported/Eigen/FFT>

#include "semitrace/quadrature.hpp"
#include "semitrace/test_function.hpp"

namespace semitrace {

Matrix fornberg_weights(double x0, const std::vector<double>& x, int m) {
  const int n = static_cast<int>(x.size());
  Matrix c = Matrix::Zero(m + 1, n);
  double c1 = 1.0, c4 = x[0] - x0;
  c(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c(k, i) = c1 * (k * c(k - 1, i - 1) - c5 * c(k, i - 1)) / c2;
        c(0, i) = -c1 * c5 * c(0, i - 1) / c2;
      }
      for (int k = mn; k >= 1; --k) c(k, j) = (c4 * c(k, j) - k * c(k - 1, j)) / c3;
      c(0, j) = c4 * c(0, j) / c3;
    }
    c1 = c2;
  }
  return c;
}

AlmostAnalyticExtension::AlmostAnalyticExtension(SampledFunction g, int order, int stencil)
    : g_(std::move(g)), order_(order), stencil_(stencil) {
  if (order_ < 1) throw PreconditionError("almost analytic extension: order must be at least 1");
  const int n = static_cast<int>(g_.values.size());
  if (stencil_ < order_ + 4 || n < stencil_) {
    std::ostringstream os;
    os << "almost analytic extension: need a stencil of at least " << order_ + 4
       << " points and at least that many samples (have " << n << ")";
    throw PreconditionError(os.str());
  }
  double peak = 0.0;
  for (double v : g_.values) peak = std::max(peak, std::abs(v));
  spectral_ = std::abs(g_.values.front()) <= 1e-12 * peak && std::abs(g_.values.back()) <= 1e-12 * peak;
  if (!spectral_) return;
  Eigen::FFT<double> fft;
  std::vector<double> vals = g_.values;
  if (vals.size() % 2) vals.push_back(0.0);
  const int m = static_cast<int>(vals.size());
  std::vector<Complex> c;
  fft.fwd(c, vals);
  double total = 0.0, tail = 0.0;
  for (int l = 0; l < m; ++l) {
    const int ll = l <= m / 2 ? l : l - m;
    total = std::max(total, std::abs(c[l]));
    if (std::abs(ll) > m / 4) tail = std::max(tail, std::abs(c[l]));
    if (2 * std::abs(ll) == m) continue;  // drop the Nyquist mode
    coeffs_.push_back(c[l] / static_cast<double>(m));
    wavenumbers_.push_back(kTwoPi * ll / (m * g_.dx));
  }
  if (tail > 1e-6 * total) {
    std::ostringstream os;
    os << "almost analytic extension: samples under-resolved (spectral tail " << tail / total
       << "); refine the grid";
    throw PreconditionError(os.str());
  }
}

std::vector<double> AlmostAnalyticExtension::derivatives(double x) const {
  if (spectral_) {
    std::vector<Complex> acc(order_ + 2, 0.0);
    const double u = x - g_.x0;
    for (std::size_t l = 0; l < coeffs_.size(); ++l) {
      const Complex ik(0.0, wavenumbers_[l]);
      Complex term = coeffs_[l] * std::polar(1.0, wavenumbers_[l] * u);
      for (int j = 0; j <= order_ + 1; ++j) {
        acc[j] += term;
        term *= ik;
      }
    }
    std::vector<double> d(order_ + 2);
    for (int j = 0; j <= order_ + 1; ++j) d[j] = acc[j].real();
    return d;
  }
  const int n = static_cast<int>(g_.values.size());
  const double u = (x - g_.x0) / g_.dx;
  int first = static_cast<int>(std::floor(u)) - stencil_ / 2 + 1;
  first = std::clamp(first, 0, n - stencil_);
  std::vector<double> nodes(stencil_);
  for (int i = 0; i < stencil_; ++i) nodes[i] = (first + i) * g_.dx;
  const Matrix w = fornberg_weights(x - g_.x0, nodes, order_ + 1);
  std::vector<double> d(order_ + 2, 0.0);
  for (int k = 0; k <= order_ + 1; ++k)
    for (int i = 0; i < stencil_; ++i) d[k] += w(k, i) * g_.values[first + i];
  return d;
}

double AlmostAnalyticExtension::derivative(int j, double x) const {
  if (j < 0 || j > order_ + 1) throw PreconditionError("almost analytic extension: derivative order out of range");
  return derivatives(x)[j];
}

Complex AlmostAnalyticExtension::operator()(Complex z) const {
  const auto d = derivatives(z.real());
  const Complex iy(0.0, z.imag());
  Complex s = 0.0, p = 1.0;
  for (int j = 0; j <= order_; ++j) {
    s += d[j] * p;
    p *= iy / static_cast<double>(j + 1);
  }
  return s;
}

Complex AlmostAnalyticExtension::dbar(Complex z) const {
  const double top = derivative(order_ + 1, z.real());
  Complex p = 1.0;
  const Complex iy(0.0, z.imag());
  for (int j = 1; j <= order_; ++j) p *= iy / static_cast<double>(j);
  return 0.5 * top * p;
}

ComplexMatrix hs_functional_calculus(const ComplexMatrix& a, const SampledFunction& g,
                                     const HsOptions& opt) {
  const int n = static_cast<int>(a.rows());
  if ((a - a.adjoint()).norm() > 1e-12 * std::max(1.0, a.norm()))
    throw PreconditionError("hs_functional_calculus: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a, Eigen::EigenvaluesOnly);
  const double lo = g.x_begin(), hi = g.x_end();
  if (n > 0 && (es.eigenvalues().minCoeff() <= lo || es.eigenvalues().maxCoeff() >= hi)) {
    std::ostringstream os;
    os << "hs_functional_calculus: rectangle [" << lo << ", " << hi
       << "] does not cover the spectrum [" << es.eigenvalues().minCoeff() << ", "
       << es.eigenvalues().maxCoeff() << "]";
    throw PreconditionError(os.str());
  }
  const AlmostAnalyticExtension ext(g, opt.order, opt.stencil);
  const int xp = std::max(1, opt.x_nodes / 20), yp = std::max(1, opt.y_nodes / 40);
  const auto xr = composite_rule(lo, hi, xp);
  const auto yr = composite_rule(0.0, opt.y_max, yp);
  const double half = 0.5 * opt.y_max;
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  const ComplexMatrix id = ComplexMatrix::Identity(n, n);
  for (std::size_t ix = 0; ix < xr.nodes.size(); ++ix) {
    const double x = xr.nodes[ix];
    const auto d = ext.derivatives(x);
    for (std::size_t iy = 0; iy < yr.nodes.size(); ++iy) {
      for (double sgn : {1.0, -1.0}) {
        const double y = sgn * yr.nodes[iy];
        const Complex iyc(0.0, y);
        // Cutoff chi(y) = 1 - step((|y| - Y/2) / (Y/2)).
        const double u = (std::abs(y) - half) / half;
        const double chi = 1.0 - smooth_step(u);
        const double dchi = -sgn * smooth_step_derivative(u) / half;
        Complex gt = 0.0, p = 1.0, top = 0.0;
        for (int j = 0; j <= opt.order; ++j) {
          gt += d[j] * p;
          if (j == opt.order) top = 0.5 * d[j + 1] * p;
          p *= iyc / static_cast<double>(j + 1);
        }
        const Complex dbar = top * chi + Complex(0.0, 0.5) * gt * dchi;
        if (dbar == 0.0) continue;
        const Complex z(x, y);
        const ComplexMatrix res = (z * id - a).partialPivLu().solve(id);
        out -= (xr.weights[ix] * yr.weights[iy] / kPi) * dbar * res;
      }
    }
  }
  return out;
}

ComplexMatrix eig_functional_calculus(const ComplexMatrix& a, const SampledFunction& g, int stencil) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a);
  const AlmostAnalyticExtension ext(g, 1, std::max(stencil, 5));
  ComplexVector vals(a.rows());
  for (int i = 0; i < a.rows(); ++i) {
    const double lam = es.eigenvalues()(i);
    vals(i) = (lam < g.x_begin() || lam > g.x_end()) ? 0.0 : ext.derivative(0, lam);
  }
  return es.eigenvectors() * vals.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace semitrace
