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


#include "semitrace/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <utility>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

namespace semitrace {

namespace odeint = boost::numeric::odeint;

namespace {

using State = std::vector<double>;

void self_check(const HamiltonianSystem& sys) {
  const int d = 2 * sys.dof();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double z = 0.5;
  for (int probe = 0; probe < 5; ++probe) {
    Vector m(d);
    for (int i = 0; i < d; ++i) m(i) = u(rng);
    const Vector g = sys.gradient(m, z);
    const Matrix hess = sys.hessian(m, z);
    if (g.size() != d || hess.rows() != d || hess.cols() != d)
      throw PreconditionError("system '" + sys.name() + "': gradient/Hessian have wrong shape");
    Vector g_fd(d);
    Matrix h_fd(d, d);
    const double e = 1e-5;
    for (int i = 0; i < d; ++i) {
      Vector a = m, b = m;
      a(i) += e;
      b(i) -= e;
      g_fd(i) = (sys.p(a, z) - sys.p(b, z)) / (2 * e);
      h_fd.col(i) = (sys.gradient(a, z) - sys.gradient(b, z)) / (2 * e);
    }
    const double eg = (g - g_fd).lpNorm<Eigen::Infinity>() / std::max(1.0, g.lpNorm<Eigen::Infinity>());
    const double eh =
        (hess - h_fd).lpNorm<Eigen::Infinity>() / std::max(1.0, hess.lpNorm<Eigen::Infinity>());
    if (eg > 1e-6 || eh > 1e-6) {
      std::ostringstream os;
      os << "system '" << sys.name() << "': derivative self-check failed (gradient " << eg
         << ", Hessian " << eh << ")";
      throw PreconditionError(os.str());
    }
  }
}

// State layout: m (2n) followed by the variational matrix, column major.
struct Rhs {
  const HamiltonianSystem* sys;
  double z;
  int d;

  void operator()(const State& s, State& ds, double /*t*/) const {
    Eigen::Map<const Vector> m(s.data(), d);
    Eigen::Map<const Matrix> mm(s.data() + d, d, d);
    Eigen::Map<Vector> dm(ds.data(), d);
    Eigen::Map<Matrix> dmm(ds.data() + d, d, d);
    const int n = d / 2;
    const Vector g = sys->gradient(m, z);
    dm.head(n) = g.tail(n);
    dm.tail(n) = -g.head(n);
    const Matrix hm = sys->hessian(m, z) * mm;
    dmm.topRows(n) = hm.bottomRows(n);
    dmm.bottomRows(n) = -hm.topRows(n);
  }
};

State pack(const Vector& m) {
  const int d = static_cast<int>(m.size());
  State s(d + d * d, 0.0);
  std::copy(m.data(), m.data() + d, s.begin());
  for (int i = 0; i < d; ++i) s[d + i * d + i] = 1.0;
  return s;
}

FlowResult unpack(const State& s, int d, double t) {
  FlowResult r;
  r.point = Eigen::Map<const Vector>(s.data(), d);
  r.variational = Eigen::Map<const Matrix>(s.data() + d, d, d);
  r.time = t;
  return r;
}

void check_args(const HamiltonianSystem& sys, const Vector& m, double tol) {
  if (m.size() != 2 * sys.dof()) throw PreconditionError("flow: point has wrong dimension");
  if (!(tol > 0.0)) throw PreconditionError("flow: tolerance must be positive");
}

[[noreturn]] void rethrow(const odeint::odeint_error& e, double last_good) {
  std::ostringstream os;
  os << "flow: step size underflow (" << e.what() << "); last good time " << last_good;
  throw NumericalError(os.str());
}

}  // namespace

HamiltonianSystem::HamiltonianSystem(std::string name, int dof, ScalarFn p, GradientFn gradient,
                                     HessianFn hessian, ScalarFn dp_dz)
    : name_(std::move(name)),
      dof_(dof),
      p_(std::move(p)),
      gradient_(std::move(gradient)),
      hessian_(std::move(hessian)),
      dp_dz_(std::move(dp_dz)) {
  if (dof_ < 1) throw PreconditionError("system '" + name_ + "': dof must be positive");
  self_check(*this);
}

Vector HamiltonianSystem::vector_field(const Vector& m, double z) const {
  const Vector g = gradient(m, z);
  Vector v(2 * dof_);
  v.head(dof_) = g.tail(dof_);
  v.tail(dof_) = -g.head(dof_);
  return v;
}

HamiltonianSystem anisotropic_oscillator(double w1, double w2) {
  const double a = w1 * w1, b = w2 * w2;
  return HamiltonianSystem(
      "oscillator_2d", 2,
      [=](const Vector& m, double z) {
        return 0.5 * (m(2) * m(2) + m(3) * m(3) + a * m(0) * m(0) + b * m(1) * m(1)) - z;
      },
      [=](const Vector& m, double) {
        Vector g(4);
        g << a * m(0), b * m(1), m(2), m(3);
        return g;
      },
      [=](const Vector&, double) {
        Vector diag(4);
        diag << a, b, 1.0, 1.0;
        return Matrix(diag.asDiagonal());
      },
      [](const Vector&, double) { return -1.0; });
}

HamiltonianSystem well_system(const Potential& v) {
  return HamiltonianSystem(
      "well_" + v.name, 1,
      [v](const Vector& m, double z) { return m(1) * m(1) + v.value(m(0)) - z; },
      [v](const Vector& m, double) {
        Vector g(2);
        g << v.derivative(m(0)), 2.0 * m(1);
        return g;
      },
      [v](const Vector& m, double) {
        Matrix h = Matrix::Zero(2, 2);
        h(0, 0) = v.second(m(0));
        h(1, 1) = 2.0;
        return h;
      },
      [](const Vector&, double) { return -1.0; });
}

HamiltonianSystem coupled_quartic(double w1, double w2, double eps) {
  const double a = w1 * w1, b = w2 * w2;
  return HamiltonianSystem(
      "coupled_quartic", 2,
      [=](const Vector& m, double z) {
        return 0.5 * (m(2) * m(2) + m(3) * m(3) + a * m(0) * m(0) + b * m(1) * m(1)) +
               eps * m(0) * m(0) * m(1) * m(1) - z;
      },
      [=](const Vector& m, double) {
        Vector g(4);
        g << a * m(0) + 2 * eps * m(0) * m(1) * m(1), b * m(1) + 2 * eps * m(1) * m(0) * m(0),
            m(2), m(3);
        return g;
      },
      [=](const Vector& m, double) {
        Matrix h = Matrix::Zero(4, 4);
        h(0, 0) = a + 2 * eps * m(1) * m(1);
        h(1, 1) = b + 2 * eps * m(0) * m(0);
        h(0, 1) = h(1, 0) = 4 * eps * m(0) * m(1);
        h(2, 2) = h(3, 3) = 1.0;
        return h;
      },
      [](const Vector&, double) { return -1.0; });
}

FlowResult integrate_flow(const HamiltonianSystem& sys, double z, const Vector& m, double t,
                          double tol) {
  check_args(sys, m, tol);
  if (!std::isfinite(t)) throw PreconditionError("flow: time must be finite");
  const int d = static_cast<int>(m.size());
  State s = pack(m);
  if (t == 0.0) return unpack(s, d, 0.0);
  double last_good = 0.0;
  try {
    const double dt0 = std::copysign(std::min(0.01, std::abs(t)), t);
    odeint::integrate_adaptive(
        odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State>()), Rhs{&sys, z, d}, s,
        0.0, t, dt0, [&](const State&, double tt) { last_good = tt; });
  } catch (const odeint::odeint_error& e) {
    rethrow(e, last_good);
  }
  return unpack(s, d, t);
}

std::vector<FlowResult> sample_flow(const HamiltonianSystem& sys, double z, const Vector& m,
                                    const std::vector<double>& times, double tol) {
  check_args(sys, m, tol);
  std::vector<FlowResult> out;
  if (times.empty()) return out;
  const int d = static_cast<int>(m.size());
  std::vector<double> ts;
  const bool shift = times.front() != 0.0;
  if (shift) ts.push_back(0.0);
  ts.insert(ts.end(), times.begin(), times.end());
  State s = pack(m);
  double last_good = 0.0;
  try {
    const double span = ts.back() - ts.front();
    const double dt0 = std::copysign(std::min(0.01, std::max(std::abs(span), 1e-3)), span);
    odeint::integrate_times(
        odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State>()), Rhs{&sys, z, d}, s,
        ts.begin(), ts.end(), dt0, [&](const State& x, double tt) {
          last_good = tt;
          out.push_back(unpack(x, d, tt));
        });
  } catch (const odeint::odeint_error& e) {
    rethrow(e, last_good);
  }
  if (shift) out.erase(out.begin());
  return out;
}

FlowResult first_return(const HamiltonianSystem& sys, double z, const Vector& m,
                        const Vector& base, const Vector& normal, double t_min, double t_max,
                        double tol) {
  check_args(sys, m, tol);
  const int d = static_cast<int>(m.size());
  const double orient = normal.dot(sys.vector_field(base, z));
  if (orient == 0.0) throw PreconditionError("first_return: section not transversal at base");
  const double sgn = orient > 0 ? 1.0 : -1.0;
  auto g = [&](const State& x) {
    return sgn * normal.dot(Eigen::Map<const Vector>(x.data(), d) - base);
  };
  auto stepper = odeint::make_dense_output(tol, tol, odeint::runge_kutta_dopri5<State>());
  Rhs rhs{&sys, z, d};
  stepper.initialize(pack(m), 0.0, 0.01);
  State tmp(d + d * d);
  double g_prev = g(stepper.current_state());
  try {
    int steps = 0;
    while (stepper.current_time() < t_max) {
      if (++steps > 2000000) throw NumericalError("first_return: step budget exhausted");
      auto [t0, t1] = stepper.do_step(rhs);
      const double g_now = g(stepper.current_state());
      if (t1 > t_min && g_prev < 0.0 && g_now >= 0.0) {
        auto gt = [&](double t) {
          stepper.calc_state(t, tmp);
          return g(tmp);
        };
        const double lo = std::max(t0, t_min);
        if (gt(lo) < 0.0) {
          boost::uintmax_t iters = 200;
          auto root = boost::math::tools::toms748_solve(
              gt, lo, t1, gt(lo), g_now,
              [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(a)); },
              iters);
          const double t_hit = 0.5 * (root.first + root.second);
          if (t_hit <= t_max) return integrate_flow(sys, z, m, t_hit, tol);
        }
      }
      g_prev = g_now;
    }
  } catch (const odeint::odeint_error& e) {
    rethrow(e, stepper.current_time());
  }
  std::ostringstream os;
  os << "first_return: no return to the section within time " << t_max;
  throw NumericalError(os.str());
}

}  // namespace semitrace
