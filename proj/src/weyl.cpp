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


#include "semitrace/weyl.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <unsupported/Eigen/FFT>

namespace semitrace {

double Diffeomorphism::inv(double y) const {
  if (inverse) return inverse(y);
  auto g = [&](double x) { return map(x) - y; };
  double lo = y - 1.0, hi = y + 1.0;
  while (g(lo) > 0.0) lo -= 2.0 * (hi - lo);
  while (g(hi) < 0.0) hi += 2.0 * (hi - lo);
  boost::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(
      g, lo, hi, [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(a)); },
      iters);
  return 0.5 * (r.first + r.second);
}

double periodic_interpolation_weight(const WeylGrid& grid, double x, int k) {
  const int n = grid.n;
  const double theta = kTwoPi * (x - grid.x(k)) / (grid.x_max - grid.x_min);
  const double t = std::tan(0.5 * theta);
  if (std::abs(t) < 1e-12) {
    // Near a node (mod the period) the kernel tends to cos(n theta / 2) = +-1.
    return std::cos(0.5 * n * theta);
  }
  return std::sin(0.5 * n * theta) / (n * t);
}

ComplexMatrix weyl_quantize(const Symbol& a, double h, const WeylGrid& grid, double xi_support) {
  const int n = grid.n;
  if (n < 4 || n % 2) throw PreconditionError("weyl_quantize: grid size must be even and at least 4");
  const double dx = grid.dx();
  const double ppw = kTwoPi * h / (xi_support * dx);
  if (ppw < 8.0) {
    std::ostringstream os;
    os << "weyl_quantize: grid too coarse for h = " << h << " (" << ppw
       << " points per wavelength, need 8; at least "
       << static_cast<int>(std::ceil(8.0 * xi_support * (grid.x_max - grid.x_min) / (kTwoPi * h)))
       << " points)";
    throw PreconditionError(os.str());
  }
  const double dk = kTwoPi / (n * dx);
  Eigen::FFT<double> fft;
  std::vector<Complex> spec(n), kern(n);
  ComplexMatrix k = ComplexMatrix::Zero(n, n);
  // Pairs (j, k) are coupled through the shortest periodic offset d = j - k
  // and the midpoint x_k + d dx / 2, indexed on the half-step circle.
  // The antipodal offset n/2 is shared evenly between its two midpoints.
  struct Pair {
    int j, c;
    double w;
  };
  std::vector<std::vector<Pair>> pairs(2 * n);
  auto wrap2 = [n](int s) { return ((s % (2 * n)) + 2 * n) % (2 * n); };
  for (int j = 0; j < n; ++j)
    for (int c = 0; c < n; ++c) {
      int d = ((j - c) % n + n) % n;
      if (d == n / 2) {
        pairs[wrap2(2 * c + d)].push_back({j, c, 0.5});
        pairs[wrap2(2 * c - d)].push_back({j, c, 0.5});
        continue;
      }
      if (d > n / 2) d -= n;
      pairs[wrap2(2 * c + d)].push_back({j, c, 1.0});
    }
  for (int s = 0; s < 2 * n; ++s) {
    if (pairs[s].empty()) continue;
    const double mid = grid.x_min + 0.5 * s * dx;
    for (int l = 0; l < n; ++l) {
      const int ll = l <= n / 2 ? l : l - n;
      if (l == n / 2) {
        spec[l] = 0.5 * (a(mid, h * ll * dk) + a(mid, -h * ll * dk));
      } else {
        spec[l] = a(mid, h * ll * dk);
      }
    }
    fft.inv(kern, spec);  // (1/n) sum_l spec_l e^{2 pi i l m / n}
    for (const auto& p : pairs[s]) k(p.j, p.c) += p.w * kern[((p.j - p.c) % n + n) % n];
  }
  return k;
}

double weyl_invariance_residual(const Symbol& a, const Diffeomorphism& kappa, double h,
                                const WeylGrid& grid, double xi_support, double interior) {
  const int n = grid.n;
  double min_slope = 1e300;
  std::vector<double> kx(n), kpx(n), inv_x(n), kp_inv(n);
  for (int j = 0; j < n; ++j) {
    const double x = grid.x(j);
    kx[j] = kappa.map(x);
    kpx[j] = kappa.derivative(x);
    inv_x[j] = kappa.inv(x);
    kp_inv[j] = kappa.derivative(inv_x[j]);
    min_slope = std::min({min_slope, kpx[j], kp_inv[j]});
  }
  if (!(min_slope > 0.0)) throw PreconditionError("weyl_invariance_residual: kappa' must be positive");

  Matrix u(n, n), uinv(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) {
      u(j, k) = std::sqrt(kpx[j]) * periodic_interpolation_weight(grid, kx[j], k);
      uinv(j, k) = periodic_interpolation_weight(grid, inv_x[j], k) / std::sqrt(kp_inv[j]);
    }
  }
  // weyl_quantize sweeps xi at fixed midpoint, so the inverse is cached per midpoint.
  double last_xt = std::nan(""), last_x = 0.0, last_slope = 1.0;
  const Symbol pulled = [&](double xt, double xit) {
    if (xt != last_xt) {
      last_xt = xt;
      last_x = kappa.inv(xt);
      last_slope = kappa.derivative(last_x);
    }
    return a(last_x, last_slope * xit);
  };
  const ComplexMatrix op_a = weyl_quantize(a, h, grid, xi_support);
  const ComplexMatrix op_t = weyl_quantize(pulled, h, grid, xi_support / min_slope);

  std::vector<int> idx;
  for (int j = 0; j < n; ++j)
    if (std::abs(grid.x(j)) <= interior) idx.push_back(j);
  const int m = static_cast<int>(idx.size());
  ComplexMatrix u_rows(m, n), uinv_cols(n, m), r(m, m);
  for (int i = 0; i < m; ++i) {
    u_rows.row(i) = u.row(idx[i]).cast<Complex>();
    uinv_cols.col(i) = uinv.col(idx[i]).cast<Complex>();
  }
  r.noalias() = u_rows * (op_t * uinv_cols);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) r(i, j) -= op_a(idx[i], idx[j]);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(r.adjoint() * r, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

}  // namespace semitrace
