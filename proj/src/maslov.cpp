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

#include "semitrace/maslov.hpp"

#include <cmath>
#include <complex>
#include <optional>
#include <sstream>

#include <Eigen/Eigenvalues>

namespace semitrace {

SymplecticPath::SymplecticPath(double t_begin, double t_end, Evaluator eval, int samples,
                               double symplectic_tol)
    : t_begin_(t_begin), t_end_(t_end), eval_(std::move(eval)), tol_(symplectic_tol) {
  if (!(t_end >= t_begin)) throw PreconditionError("symplectic path: t_end < t_begin");
  if (!eval_) throw PreconditionError("symplectic path: missing evaluator");
  samples = std::max(samples, 2);
  samples_.reserve(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) {
    const double t = t_begin + (t_end - t_begin) * i / (samples - 1);
    samples_.push_back({t, (*this)(t)});
  }
  dim_ = static_cast<int>(samples_.front().s.rows());
}

Matrix SymplecticPath::operator()(double t) const {
  Matrix s = eval_(t);
  // Validation only; SymplecticMatrix throws on a defect above tolerance.
  SymplecticMatrix check(s, tol_);
  (void)check;
  return s;
}

SymplecticPath SymplecticPath::reversed() const {
  const double a = t_begin_;
  const double b = t_end_;
  auto eval = eval_;
  return SymplecticPath(a, b, [eval, a, b](double t) { return eval(a + b - t); },
                        static_cast<int>(samples_.size()), tol_);
}

SymplecticPath concatenate(const SymplecticPath& first, const SymplecticPath& second) {
  const Matrix end = first(first.t_end());
  const Matrix start = second(second.t_begin());
  if ((end - start).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, end.cwiseAbs().maxCoeff())) {
    throw PreconditionError("concatenate: paths do not join");
  }
  const double split = first.t_end();
  const double shift = second.t_begin() - split;
  const double t_end = split + (second.t_end() - second.t_begin());
  return SymplecticPath(
      first.t_begin(), t_end,
      [first, second, split, shift](double t) {
        return t <= split ? first(t) : second(t + shift);
      },
      static_cast<int>(first.samples().size() + second.samples().size()),
      std::max(first.symplectic_tol(), second.symplectic_tol()));
}

namespace {

Matrix orthonormalize(const Matrix& b) {
  Eigen::HouseholderQR<Matrix> qr(b);
  return qr.householderQ() * Matrix::Identity(b.rows(), b.cols());
}

double min_singular(const Matrix& a, const Matrix& b) {
  Matrix stacked(a.rows(), a.cols() + b.cols());
  stacked << a, b;
  Eigen::JacobiSVD<Matrix> svd(stacked);
  return svd.singularValues().minCoeff();
}

double projector_distance(const Matrix& qa, const Matrix& qb) {
  const Matrix d = qa * qa.transpose() - qb * qb.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(d, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

// Random Lagrangian in (x, xi, y, eta) with form omega_1 - omega_2: the
// coordinates Q = (x, y), P = (xi, -eta) are canonical, and {P = A Q} with A
// symmetric is Lagrangian.
Matrix random_doubled_lagrangian(int m, std::mt19937_64& rng) {
  const int d = 2 * m;
  const Matrix a = random_symmetric(d, rng, 2.0);
  Matrix basis = Matrix::Zero(2 * d, d);
  basis.block(0, 0, m, m) = Matrix::Identity(m, m);
  basis.block(m, 0, m, d) = a.topRows(m);
  basis.block(d, m, m, m) = Matrix::Identity(m, m);
  basis.block(d + m, 0, m, d) = -a.bottomRows(m);
  return basis;
}

class MaslovSolver {
 public:
  MaslovSolver(const SymplecticPath& path, const MaslovOptions& opt)
      : path_(path), opt_(opt), rng_(opt.seed), m_(path.dim() / 2),
        form_(doubled_form(m_)), diagonal_(orthonormalize(diagonal_lagrangian(m_).basis())) {}

  int run() { return interval(path_.t_begin(), path_.t_end(), 0); }

 private:
  Matrix graph_basis(double t) const {
    const Matrix s = path_(t);
    Matrix b(2 * s.rows(), s.cols());
    b.topRows(s.rows()) = s;
    b.bottomRows(s.rows()) = Matrix::Identity(s.rows(), s.cols());
    return orthonormalize(b);
  }

  int hk(const Matrix& gamma, const Matrix& m) const {
    const LagrangianFrame g(gamma, form_, 1.0);
    const LagrangianFrame d(diagonal_, form_, 1.0);
    const LagrangianFrame mm(m, form_, 1.0);
    return hk_index(g, d, mm, opt_.signature_tol);
  }

  std::optional<Matrix> find_transversal(const std::vector<Matrix>& frames) {
    for (int c = 0; c < opt_.candidates; ++c) {
      const Matrix cand = orthonormalize(random_doubled_lagrangian(m_, rng_));
      if (min_singular(cand, diagonal_) < opt_.transversality) continue;
      std::vector<double> sigma(frames.size());
      bool ok = true;
      for (std::size_t i = 0; i < frames.size() && ok; ++i) {
        sigma[i] = min_singular(cand, frames[i]);
        ok = sigma[i] >= opt_.transversality;
      }
      for (std::size_t i = 0; ok && i + 1 < frames.size(); ++i) {
        ok = steps_[i] < 0.5 * std::min(sigma[i], sigma[i + 1]);
      }
      if (ok) return cand;
    }
    return std::nullopt;
  }

  int interval(double a, double b, int depth) {
    std::vector<Matrix> frames;
    frames.reserve(static_cast<std::size_t>(opt_.grid));
    for (int i = 0; i < opt_.grid; ++i) {
      frames.push_back(graph_basis(a + (b - a) * i / (opt_.grid - 1)));
    }
    steps_.assign(frames.size() - 1, 0.0);
    for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
      steps_[i] = projector_distance(frames[i], frames[i + 1]);
    }
    if (auto m = find_transversal(frames)) {
      return hk(frames.front(), *m) - hk(frames.back(), *m);
    }
    if (depth >= opt_.max_depth) {
      std::ostringstream msg;
      msg << "path too wild: no certified transversal Lagrangian on [" << a << ", " << b
          << "] after " << depth << " refinements";
      throw NumericalError(msg.str());
    }
    const double mid = 0.5 * (a + b);
    return interval(a, mid, depth + 1) + interval(mid, b, depth + 1);
  }

  const SymplecticPath& path_;
  MaslovOptions opt_;
  std::mt19937_64 rng_;
  int m_;
  Matrix form_;
  Matrix diagonal_;
  std::vector<double> steps_;
};

}  // namespace

int maslov_index_twice(const SymplecticPath& path, const MaslovOptions& options) {
  if (path.dim() == 0) return 0;
  if (options.grid < 2) throw PreconditionError("maslov: grid needs at least 2 points");
  MaslovSolver solver(path, options);
  return solver.run();
}

int maslov_index_path(const SymplecticPath& path, const MaslovOptions& options) {
  const int twice = maslov_index_twice(path, options);
  if (twice % 2 != 0) {
    throw NumericalError(
        "maslov: odd half-sum (endpoint meets the diagonal in odd dimension)");
  }
  return twice / 2;
}

SymplecticPath symplectic_path_from_identity(const SymplecticMatrix& s, int samples) {
  const int n = s.degrees_of_freedom();
  if (n == 0) {
    return SymplecticPath(0.0, 1.0, [](double) { return Matrix(0, 0); }, samples);
  }
  const Matrix& sm = s.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> gram(sm.transpose() * sm);
  const Matrix v = gram.eigenvectors();
  const Vector d = gram.eigenvalues();
  const Matrix p_inv = v * d.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
  const Matrix q = sm * p_inv;

  ComplexMatrix u(n, n);
  u.real() = q.topLeftCorner(n, n);
  u.imag() = q.bottomLeftCorner(n, n);
  Eigen::ComplexSchur<ComplexMatrix> schur(u);
  const ComplexMatrix z = schur.matrixU();
  ComplexVector phases(n);
  for (int i = 0; i < n; ++i) phases[i] = std::arg(schur.matrixT()(i, i));

  auto eval = [n, v, d, z, phases](double t) {
    const Matrix pt = v * d.array().pow(0.5 * t).matrix().asDiagonal() * v.transpose();
    ComplexVector rot(n);
    for (int i = 0; i < n; ++i) rot[i] = std::exp(Complex(0.0, t * phases[i].real()));
    const ComplexMatrix ut = z * rot.asDiagonal() * z.adjoint();
    Matrix qt(2 * n, 2 * n);
    qt.topLeftCorner(n, n) = ut.real();
    qt.topRightCorner(n, n) = -ut.imag();
    qt.bottomLeftCorner(n, n) = ut.imag();
    qt.bottomRightCorner(n, n) = ut.real();
    return Matrix(qt * pt);
  };
  return SymplecticPath(0.0, 1.0, eval, samples);
}

}  // namespace semitrace
