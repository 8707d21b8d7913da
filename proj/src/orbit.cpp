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


#include "semitrace/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace semitrace {

namespace {

// Variational matrices from the integrator are symplectic only to integrator accuracy.
constexpr double kFlowSymplecticTol = 1e-6;

// Symplectic Gram-Schmidt with fixed pairing: columns (a_1..a_m, b_1..b_m),
// a_i paired with b_i in order. Returns (e_1..e_m, f_1..f_m) with omega(e_i, f_j) = delta_ij.
Matrix symplectic_gram_schmidt(Matrix v, double min_pairing) {
  const int m = static_cast<int>(v.cols()) / 2;
  for (int i = 0; i < m; ++i) {
    Vector e = v.col(i);
    Vector f = v.col(m + i);
    const double w = omega(e, f);
    if (std::abs(w) < min_pairing * std::max(1e-300, e.norm() * f.norm()))
      throw NumericalError("symplectic Gram-Schmidt: degenerate pairing");
    f /= w;
    v.col(i) = e;
    v.col(m + i) = f;
    for (int j = 0; j < 2 * m; ++j) {
      if (j == i || j == m + i) continue;
      const Vector u = v.col(j);
      v.col(j) = u - omega(u, f) * e + omega(u, e) * f;
    }
  }
  return v;
}

// Symplectic basis of {v : <n, v> = 0, <g, v> = 0}.
Matrix build_section_frame(const Vector& n, const Vector& g) {
  const int d = static_cast<int>(n.size());
  const int m = d / 2 - 1;
  if (m == 0) return Matrix(d, 0);
  Matrix c(2, d);
  c.row(0) = n.transpose();
  c.row(1) = g.transpose();
  Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeFullV);
  const Matrix null = svd.matrixV().rightCols(d - 2);
  // Pair each vector with the one it is most strongly coupled to.
  std::vector<int> rest(null.cols());
  for (int i = 0; i < static_cast<int>(rest.size()); ++i) rest[i] = i;
  Matrix ordered(d, 2 * m);
  Matrix work = null;
  for (int i = 0; i < m; ++i) {
    const Vector a = work.col(rest.front());
    int best = -1;
    double best_w = 0.0;
    for (std::size_t r = 1; r < rest.size(); ++r) {
      const double w = std::abs(omega(a, work.col(rest[r])));
      if (w > best_w) best_w = w, best = static_cast<int>(r);
    }
    if (best < 0 || best_w < 1e-10) throw NumericalError("section subspace is not symplectic");
    Vector b = work.col(rest[best]) / omega(a, work.col(rest[best]));
    ordered.col(i) = a;
    ordered.col(m + i) = b;
    rest.erase(rest.begin() + best);
    rest.erase(rest.begin());
    for (int r : rest) {
      const Vector u = work.col(r);
      work.col(r) = u - omega(u, b) * a + omega(u, a) * b;
      work.col(r).normalize();
    }
  }
  return symplectic_gram_schmidt(ordered, 1e-12);
}

// Coordinates (in the symplectic frame F) of vectors w, modulo the omega-orthogonal complement of F.
Matrix frame_coordinates(const Matrix& frame, const Matrix& w) {
  const int m = static_cast<int>(frame.cols()) / 2;
  const Matrix j = standard_form(static_cast<int>(frame.rows()) / 2);
  return -standard_form(m) * frame.transpose() * j * w;
}

int count_turning_points(const HamiltonianSystem& sys, double z, const Vector& m0, double period,
                         int samples, double tol) {
  std::vector<double> ts(samples);
  for (int i = 0; i < samples; ++i) ts[i] = (i + 0.5) * period / samples;
  const auto flow = sample_flow(sys, z, m0, ts, tol);
  const int n = sys.dof();
  int count = 0;
  for (int i = 0; i < samples; ++i) {
    const Vector a = sys.vector_field(flow[i].point, z).head(n);
    const Vector b = sys.vector_field(flow[(i + 1) % samples].point, z).head(n);
    if (a.dot(b) < 0.0) ++count;
  }
  return count;
}

}  // namespace

SectionSpec SectionSpec::orthogonal(const HamiltonianSystem& sys, double z, const Vector& base) {
  SectionSpec s;
  s.base = base;
  s.normal = sys.vector_field(base, z);
  const double nn = s.normal.norm();
  if (nn == 0.0) throw PreconditionError("section: base point is an equilibrium");
  s.normal /= nn;
  return s;
}

void SectionSpec::validate(const HamiltonianSystem& sys, double z) const {
  if (base.size() != 2 * sys.dof() || normal.size() != base.size())
    throw PreconditionError("section: base/normal have wrong dimension");
  const Vector x = sys.vector_field(base, z);
  const double c = std::abs(normal.dot(x));
  if (!(c >= 1e-6 * normal.norm() * x.norm()) || x.norm() == 0.0) {
    std::ostringstream os;
    os << "section: normal not transversal to the flow (|<n, H_p>| = " << c << ")";
    throw PreconditionError(os.str());
  }
}

ClosedOrbit::ClosedOrbit(HamiltonianSystem sys, double z, Vector point, double period,
                         SectionSpec section, OrbitOptions options)
    : sys_(std::move(sys)),
      z_(z),
      point_(std::move(point)),
      period_(period),
      section_(std::move(section)),
      options_(std::move(options)),
      monodromy_(SymplecticMatrix::identity(sys_.dof())),
      reduced_(SymplecticMatrix::identity(sys_.dof() - 1)) {
  if (!(period_ > 0.0)) throw PreconditionError("orbit: period must be positive");
  const int s = std::max(8, options_.samples);
  std::vector<double> ts(s + 1);
  for (int i = 0; i <= s; ++i) ts[i] = period_ * i / s;
  samples_ = sample_flow(sys_, z_, point_, ts, options_.integrator_tol);
  residual_ = (samples_.back().point - point_).norm();
  monodromy_ = SymplecticMatrix(samples_.back().variational, kFlowSymplecticTol);
  action_ = orbit_action(*this);
  section_.base = point_;
  section_.validate(sys_, z_);
  frame_ = build_section_frame(section_.normal, sys_.gradient(point_, z_));
  reduced_ = reduce_monodromy(*this, section_);
  turning_points_ =
      count_turning_points(sys_, z_, point_, period_, s, options_.integrator_tol);
}

int ClosedOrbit::maslov(int k) const {
  auto it = maslov_.find(k);
  if (it != maslov_.end()) return it->second;
  return orbit_maslov(*this, k);
}

Matrix ClosedOrbit::linearized_flow(double t) const {
  const double q = std::floor(t / period_);
  double r = t - q * period_;
  if (r < 0.0) r = 0.0;
  const Matrix mr = integrate_flow(sys_, z_, point_, r, options_.integrator_tol).variational;
  const int qi = static_cast<int>(q);
  if (qi == 0) return mr;
  return mr * monodromy_.power(qi).matrix();
}

Vector ClosedOrbit::point_at(double t) const {
  double r = std::fmod(t, period_);
  if (r < 0.0) r += period_;
  return integrate_flow(sys_, z_, point_, r, options_.integrator_tol).point;
}

ClosedOrbit find_closed_orbit(const HamiltonianSystem& sys, double z, const Vector& guess,
                              const SectionSpec& section, int N, const OrbitOptions& options) {
  if (N < 1) throw PreconditionError("find_closed_orbit: N must be at least 1");
  if (guess.size() != 2 * sys.dof()) throw PreconditionError("find_closed_orbit: guess has wrong dimension");
  section.validate(sys, z);
  const Vector nrm = section.normal / section.normal.norm();
  const double tol = options.integrator_tol;
  const int d = static_cast<int>(guess.size());

  Vector m = guess - nrm.dot(guess - section.base) * nrm;
  const Vector field = sys.vector_field(m, z);
  if (field.norm() == 0.0) throw PreconditionError("find_closed_orbit: guess is an equilibrium");
  const double t_est = kTwoPi * std::max(1.0, m.norm() / field.norm());
  const double t_budget = options.time_budget * t_est;
  double period = first_return(sys, z, m, m, nrm, 1e-3 * t_est, t_budget, tol).time;

  struct Eval {
    Vector f;
    FlowResult flow;
  };
  auto evaluate = [&](const Vector& mm, double tt) {
    Eval e{Vector(d + 2), integrate_flow(sys, z, mm, tt, tol)};
    e.f.head(d) = e.flow.point - mm;
    e.f(d) = sys.p(mm, z);
    e.f(d + 1) = nrm.dot(mm - section.base);
    return e;
  };
  auto converged = [&](const Eval& e) {
    return e.f.head(d).norm() <= options.orbit_tol && std::abs(e.f(d)) <= options.orbit_tol &&
           std::abs(e.f(d + 1)) <= options.orbit_tol;
  };

  Eval cur = evaluate(m, period);
  int iterations = 0;
  while (!converged(cur)) {
    if (iterations >= options.max_iterations) {
      std::ostringstream os;
      os << "find_closed_orbit: Newton did not converge in " << options.max_iterations
         << " iterations (residual " << cur.f.norm() << ")";
      throw NumericalError(os.str());
    }
    ++iterations;
    Matrix jac = Matrix::Zero(d + 2, d + 1);
    jac.topLeftCorner(d, d) = cur.flow.variational - Matrix::Identity(d, d);
    jac.topRightCorner(d, 1) = sys.vector_field(cur.flow.point, z);
    jac.block(d, 0, 1, d) = sys.gradient(m, z).transpose();
    jac.block(d + 1, 0, 1, d) = nrm.transpose();
    const Vector step = jac.completeOrthogonalDecomposition().solve(-cur.f);
    double lambda = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 30; ++halving, lambda *= 0.5) {
      const double t_new = period + lambda * step(d);
      if (!(t_new > 0.0)) continue;
      const Vector m_new = m + lambda * step.head(d);
      Eval trial = evaluate(m_new, t_new);
      if (trial.f.norm() < cur.f.norm()) {
        m = m_new;
        period = t_new;
        cur = std::move(trial);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (cur.f.norm() <= 10 * options.orbit_tol) break;
      std::ostringstream os;
      os << "find_closed_orbit: line search failed (residual " << cur.f.norm() << ")";
      throw NumericalError(os.str());
    }
  }

  SectionSpec sec = section;
  ClosedOrbit orbit(sys, z, m, period, sec, options);
  orbit.newton_iterations_ = iterations;
  orbit.residual_ = cur.f.head(d).norm();
  for (int k = 1; k <= N; ++k) {
    orbit.maslov_[k] = orbit_maslov(orbit, k);
    orbit.maslov_[-k] = orbit_maslov(orbit, -k);
  }
  return orbit;
}

double orbit_action(const ClosedOrbit& orbit, int samples) {
  const auto& sys = orbit.system();
  const int n = sys.dof();
  std::vector<FlowResult> owned;
  const std::vector<FlowResult>* pts = &orbit.samples();
  if (samples > 0) {
    std::vector<double> ts(samples + 1);
    for (int i = 0; i <= samples; ++i) ts[i] = orbit.period() * i / samples;
    owned = sample_flow(sys, orbit.energy(), orbit.point(), ts, orbit.options().integrator_tol);
    pts = &owned;
  }
  // Periodic trapezoid: drop the duplicated endpoint.
  const int s = static_cast<int>(pts->size()) - 1;
  double sum = 0.0;
  for (int i = 0; i < s; ++i) {
    const Vector& m = (*pts)[i].point;
    const Vector v = sys.vector_field(m, orbit.energy());
    sum += m.tail(n).dot(v.head(n));
  }
  return sum * orbit.period() / s;
}

SymplecticMatrix reduce_monodromy(const ClosedOrbit& orbit, const SectionSpec& section) {
  const auto& sys = orbit.system();
  const double z = orbit.energy();
  section.validate(sys, z);
  if (sys.dof() == 1) return SymplecticMatrix(Matrix(0, 0));
  const Vector m0 = orbit.point();
  const Matrix frame = build_section_frame(section.normal, sys.gradient(m0, z));
  const Matrix dc = frame_coordinates(frame, orbit.monodromy().matrix() * frame);
  return SymplecticMatrix(dc, kFlowSymplecticTol);
}

std::vector<NondegeneracyEntry> check_nondegeneracy(const SymplecticMatrix& dc, int N, double tol) {
  std::vector<NondegeneracyEntry> out;
  const int d = dc.dim();
  for (int a = 1; a <= N; ++a) {
    for (int k : {a, -a}) {
      const double det = (dc.power(k).matrix() - Matrix::Identity(d, d)).determinant();
      out.push_back({k, det, std::abs(det) >= tol});
    }
  }
  return out;
}

int orbit_transverse_maslov(const ClosedOrbit& orbit, int k) {
  if (k == 0) throw PreconditionError("orbit_maslov: k must be nonzero");
  const auto& sys = orbit.system();
  if (sys.dof() == 1) return 0;
  const double z = orbit.energy();
  const Matrix f0 = orbit.section_frame();
  const double sign = k > 0 ? 1.0 : -1.0;
  const double span = std::abs(k) * orbit.period();
  auto eval = [&orbit, &sys, f0, sign, z](double t) -> Matrix {
    const double tt = sign * t;
    const Matrix m = orbit.linearized_flow(tt);
    Vector g = sys.gradient(orbit.point_at(tt), z);
    g.normalize();
    // Orthogonal projection of the initial frame onto the energy-shell tangent at m(t).
    const Matrix projected = f0 - g * (g.transpose() * f0);
    const Matrix ft = symplectic_gram_schmidt(projected, 1e-6);
    return frame_coordinates(ft, m * f0);
  };
  const int samples = 16 * std::abs(k) + 1;
  SymplecticPath path(0.0, span, eval, samples, 1e-6);
  return maslov_index_path(path, orbit.options().maslov);
}

int orbit_maslov(const ClosedOrbit& orbit, int k) {
  return orbit_transverse_maslov(orbit, k) - k * orbit.turning_points();
}

}  // namespace semitrace
