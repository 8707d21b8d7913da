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

#include "semitrace/maslov.hpp"

using namespace semitrace;

namespace {

// Block-diagonal flow: block i rotates with angular speed w[i] (w < 0 rotates
// backwards) or, for hyperbolic blocks, stretches as diag(e^{w t}, e^{-w t}).
struct BlockFlow {
  std::vector<double> speed;
  std::vector<bool> hyperbolic;

  int n() const { return static_cast<int>(speed.size()); }

  Matrix operator()(double t) const {
    const int m = n();
    Matrix s = Matrix::Zero(2 * m, 2 * m);
    for (int i = 0; i < m; ++i) {
      const double a = speed[i] * t;
      if (hyperbolic[i]) {
        s(i, i) = std::exp(a);
        s(m + i, m + i) = std::exp(-a);
      } else {
        s(i, i) = std::cos(a);
        s(i, m + i) = std::sin(a);
        s(m + i, i) = -std::sin(a);
        s(m + i, m + i) = std::cos(a);
      }
    }
    return s;
  }
};

// Crossing-form count: at each t with ker(S(t) - I) != 0 take the Hessian of
// the generating Hamiltonian, H = -J S'(t) S(t)^{-1} (x' = H_xi, xi' = -H_x),
// restricted to the kernel. A short positive definite flow has generating
// phase x.eta - t a(x, eta), hence index 1/2 sgn(-t Hess a): each crossing
// counts with the opposite sign of its form, endpoints with weight 1/2.
double crossing_oracle(const std::function<Matrix(double)>& path, double a, double b) {
  const int d = static_cast<int>(path(a).rows());
  const Matrix j = standard_form(d / 2);
  auto smin = [&](double t) {
    Eigen::JacobiSVD<Matrix> svd(path(t) - Matrix::Identity(d, d));
    return svd.singularValues().minCoeff();
  };
  auto crossing_sign = [&](double t) {
    const double h = 1e-6;
    const Matrix ds = (path(t + h) - path(t - h)) / (2 * h);
    const Matrix hess = -j * ds * path(t).inverse();
    Eigen::JacobiSVD<Matrix> svd(path(t) - Matrix::Identity(d, d), Eigen::ComputeFullV);
    const Vector& sv = svd.singularValues();
    int k = 0;
    while (k < d && sv[d - 1 - k] < 1e-4) ++k;
    if (k == 0) return 0;
    const Matrix kernel = svd.matrixV().rightCols(k);
    const Matrix form = kernel.transpose() * (0.5 * (hess + hess.transpose())) * kernel;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(form);
    int sgn = 0;
    for (int i = 0; i < k; ++i) sgn += eig.eigenvalues()[i] > 0 ? 1 : -1;
    return sgn;
  };
  double total = 0.0;
  const int scan = 4000;
  std::vector<double> s(scan + 1);
  for (int i = 0; i <= scan; ++i) s[i] = smin(a + (b - a) * i / scan);
  for (int i = 0; i <= scan; ++i) {
    const bool local_min = (i == 0 || s[i] <= s[i - 1]) && (i == scan || s[i] <= s[i + 1]);
    if (!local_min || s[i] > 1e-2) continue;
    double lo = a + (b - a) * std::max(0, i - 1) / scan;
    double hi = a + (b - a) * std::min(scan, i + 1) / scan;
    for (int it = 0; it < 200; ++it) {  // golden-section refinement
      const double m1 = lo + 0.382 * (hi - lo);
      const double m2 = lo + 0.618 * (hi - lo);
      (smin(m1) < smin(m2) ? hi : lo) = (smin(m1) < smin(m2) ? m2 : m1);
    }
    double t = 0.5 * (lo + hi);
    if (i == 0) t = a;
    if (i == scan) t = b;
    if (smin(t) > 1e-7) continue;
    const double weight = (i == 0 || i == scan) ? 0.5 : 1.0;
    total -= weight * crossing_sign(std::clamp(t, a + 2e-6, b - 2e-6));
  }
  return total;
}

}  // namespace

TEST_CASE("constant path has index zero") {
  std::mt19937_64 rng(5);
  const Matrix s = random_symplectic(2, rng).matrix();
  const SymplecticPath path(0.0, 1.0, [s](double) { return s; });
  CHECK(maslov_index_path(path) == 0);
}

TEST_CASE("rotation paths against the crossing-form oracle") {
  struct Case {
    BlockFlow flow;
    double t_end;
  };
  const std::vector<Case> cases = {
      {{{1.0}, {false}}, kPi},
      {{{1.0}, {false}}, 3.0 * kPi},
      {{{-1.0}, {false}}, 3.0 * kPi},
      {{{1.0, std::sqrt(2.0)}, {false, false}}, kTwoPi},
      {{{1.0, -0.5}, {false, false}}, 5.0 * kPi},
      {{{0.7, 1.0}, {true, false}}, 2.5 * kPi},
      {{{0.7}, {true}}, 2.0},
  };
  for (const auto& c : cases) {
    const SymplecticPath path(0.0, c.t_end, c.flow);
    const double oracle = crossing_oracle(c.flow, 0.0, c.t_end);
    CAPTURE(c.t_end);
    CAPTURE(c.flow.speed[0]);
    CHECK(maslov_index_path(path) == doctest::Approx(oracle));
  }
  // Spot values: a quarter turn of a positive rotation starts at the diagonal.
  CHECK(maslov_index_path(SymplecticPath(0.0, kPi, BlockFlow{{1.0}, {false}})) == -1);
}

TEST_CASE("additivity under concatenation") {
  const BlockFlow flow{{1.0, std::sqrt(2.0)}, {false, false}};
  const SymplecticPath first(0.0, 2.0, flow);
  const SymplecticPath second(2.0, 7.5, flow);
  const SymplecticPath whole(0.0, 7.5, flow);
  const int sum = maslov_index_path(first) + maslov_index_path(second);
  CHECK(maslov_index_path(concatenate(first, second)) == sum);
  CHECK(maslov_index_path(whole) == sum);
}

TEST_CASE("independence of transversal choice and subdivision") {
  const BlockFlow flow{{1.0, -std::sqrt(3.0)}, {false, false}};
  const SymplecticPath path(0.0, 9.0, flow);
  MaslovOptions opt;
  const int reference = maslov_index_path(path, opt);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    opt.seed = seed;
    opt.grid = 5 + 2 * static_cast<int>(seed);
    CHECK(maslov_index_path(path, opt) == reference);
  }
}

TEST_CASE("reversal negates the index") {
  const BlockFlow flow{{1.0}, {false}};
  // Both endpoints transversal to the diagonal.
  const SymplecticPath path(0.5, 8.0, flow);
  CHECK(maslov_index_path(path.reversed()) == -maslov_index_path(path));
}

TEST_CASE("symplectic path from the identity") {
  CHECK(symplectic_path_from_identity(SymplecticMatrix::identity(2))(0.6).isApprox(
      Matrix::Identity(4, 4)));

  const double theta = 2.2;
  const Matrix r = BlockFlow{{1.0}, {false}}(theta);
  const auto rpath = symplectic_path_from_identity(SymplecticMatrix(r));
  CHECK((rpath(1.0) - r).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((rpath(0.5) - BlockFlow{{1.0}, {false}}(0.5 * theta)).cwiseAbs().maxCoeff() < 1e-10);

  Matrix hyp = Matrix::Zero(2, 2);
  hyp(0, 0) = 2.0;
  hyp(1, 1) = 0.5;
  const auto hpath = symplectic_path_from_identity(SymplecticMatrix(hyp));
  CHECK((hpath(1.0) - hyp).cwiseAbs().maxCoeff() < 1e-10);
  for (const auto& sample : hpath.samples()) {
    CHECK(SymplecticMatrix(sample.s).symplectic_defect() < 1e-12);
  }

  std::mt19937_64 rng(23);
  for (int i = 0; i < 20; ++i) {
    const auto s = random_symplectic(1 + i % 3, rng);
    const auto path = symplectic_path_from_identity(s);
    CHECK((path(1.0) - s.matrix()).cwiseAbs().maxCoeff() < 1e-9 * s.matrix().squaredNorm());
    CHECK((path(0.0) - Matrix::Identity(s.dim(), s.dim())).cwiseAbs().maxCoeff() < 1e-10);
  }
}
