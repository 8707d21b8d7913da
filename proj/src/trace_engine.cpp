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


#include "semitrace/trace_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "semitrace/quadrature.hpp"
#include "semitrace/spectra.hpp"

namespace semitrace {

namespace {

// Envelope of |f| near lambda, sampled so that oscillation zeros do not fool it.
// bump_transform bottoms out near 1e-17 (round-off).
double envelope(const TestFunction& f, double lambda) {
  double e = 0.0;
  for (const auto& b : f.bumps()) e += std::abs(b.amplitude) * b.half_width * std::abs(bump_transform(lambda * b.half_width));
  return e / kTwoPi;
}

int poisson_truncation(const TestFunction& f) {
  double scale = 0.0;
  for (const auto& b : f.bumps()) scale += std::abs(b.amplitude) * b.half_width;
  scale = std::max(scale, 1e-300);
  for (double m = 32.0; m <= 4e6; m *= 1.25) {
    double worst = 0.0;
    for (int s = 4; s <= 8; ++s) worst = std::max(worst, envelope(f, 0.125 * s * m));
    if (worst <= 1e-15 * scale) return static_cast<int>(std::ceil(m));
  }
  throw NumericalError("poisson_both_sides: test function decays too slowly to truncate the lattice sum");
}

template <class F>
double solve_increasing(F&& g, double lo, double hi) {
  boost::uintmax_t iters = 200;
  auto r = boost::math::tools::toms748_solve(
      g, lo, hi, [](double a, double b) { return std::abs(b - a) <= 4e-16 * std::max(1.0, std::abs(a)); }, iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace

PoissonResult poisson_both_sides(const TestFunction& f, double h, int N) {
  if (h <= 0.0) throw PreconditionError("poisson_both_sides: h must be positive");
  if (N < 1) throw PreconditionError("poisson_both_sides: N must be at least 1");
  for (const auto& [lo, hi] : f.support()) {
    if (lo <= -kTwoPi * N || hi >= kTwoPi * N) {
      std::ostringstream os;
      os << "poisson_both_sides: supp fhat = [" << lo << ", " << hi << "] not inside (-2 pi N, 2 pi N) for N = " << N;
      throw PreconditionError(os.str());
    }
  }
  PoissonResult out;
  const int m = poisson_truncation(f);
  out.truncation = m;

  // Left side: the circle spectrum {h n} with a window flat on |n| <= m.
  const auto spec = model_spectrum(SpectralModel::circle(h, m + m / 4 + 2));
  const EnergyWindow chi(-h * m, h * m, 0.2 * h * m);
  out.lhs = spectral_trace(spec, f, chi, h);

  // Right side: (1/2 pi i) int f(z/h) M^k M' dz with M' = (2 pi i / h) M, over the same range.
  const auto mono = ScalarMonodromy::circle(h);
  const double zmax = 1.25 * h * m;
  const double omega = (kTwoPi * (N + 1) + f.reach()) / h;
  const int panels = 8 + static_cast<int>(std::ceil(2.0 * zmax * omega / kTwoPi / 3.0));
  const auto rule = composite_rule(-zmax, zmax, panels);
  std::vector<Complex> fz(rule.nodes.size());
  for (std::size_t i = 0; i < fz.size(); ++i) fz[i] = f(rule.nodes[i] / h) * rule.weights[i];
  out.rhs = 0.0;
  for (int k = -N; k <= N; ++k) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < fz.size(); ++i) {
      const double z = rule.nodes[i];
      const double ph = mono.action(z) / h + mono.maslov_phase();
      // M^k dM/dz / (2 pi i) = M^{k+1} I'(z) / (2 pi h)
      s += fz[i] * std::polar(1.0, (k + 1) * ph) * (mono.period(z) / (kTwoPi * h));
    }
    out.terms.push_back({k, s, f.fhat(-kTwoPi * (k + 1))});
    out.rhs += s;
  }
  return out;
}

// ---------------------------------------------------------------------------

ScalarMonodromy ScalarMonodromy::circle(double h) {
  if (h <= 0.0) throw PreconditionError("ScalarMonodromy: h must be positive");
  ScalarMonodromy m;
  m.kind_ = Kind::circle;
  m.h_ = h;
  m.phase_ = 0.0;
  return m;
}

ScalarMonodromy ScalarMonodromy::well(Potential v, double h, double center) {
  if (h <= 0.0) throw PreconditionError("ScalarMonodromy: h must be positive");
  if (!v.value) throw PreconditionError("ScalarMonodromy: potential has no value function");
  ScalarMonodromy m;
  m.kind_ = Kind::well;
  m.h_ = h;
  m.phase_ = -kPi;  // -pi/2 at each of the two turning points
  m.v_ = std::move(v);
  m.center_ = center;
  return m;
}

ScalarMonodromy& ScalarMonodromy::set_strip_constant(double l) {
  if (!(l >= 0.0)) throw PreconditionError("ScalarMonodromy: strip constant must be non-negative");
  strip_l_ = l;
  return *this;
}

double ScalarMonodromy::strip_half_width() const { return strip_l_ * h_ * std::max(0.0, std::log(1.0 / h_)); }

double ScalarMonodromy::bottom() const {
  return kind_ == Kind::circle ? -std::numeric_limits<double>::infinity() : v_(center_);
}

std::pair<double, double> ScalarMonodromy::turning_points(double z) const {
  if (kind_ == Kind::circle) throw PreconditionError("turning_points: the circle model has none");
  const double v0 = bottom();
  if (z <= v0) return {center_, center_};
  auto side = [&](double dir) {
    double s = 1.0;
    int grow = 0;
    while (v_(center_ + dir * s) < z) {
      s *= 2.0;
      if (++grow > 60) throw PreconditionError("turning_points: potential does not confine at this energy");
    }
    auto g = [&](double t) { return v_(center_ + dir * t) - z; };
    return center_ + dir * solve_increasing(g, 0.0, s);
  };
  return {side(-1.0), side(1.0)};
}

namespace {

// theta-substituted integrals over [x-, x+]: x = m - w cos(theta).
template <class F>
double well_integral(const ScalarMonodromy& mono, double z, F&& integrand) {
  const auto [xl, xr] = mono.turning_points(z);
  const double mid = 0.5 * (xl + xr), w = 0.5 * (xr - xl);
  if (w <= 0.0) return 0.0;
  return integrate_composite(
      [&](double th) {
        const double x = mid - w * std::cos(th);
        const double gap = std::max(0.0, z - mono.potential()(x));
        return integrand(gap) * w * std::sin(th);
      },
      0.0, kPi, 6);
}

}  // namespace

double ScalarMonodromy::action(double z) const {
  if (kind_ == Kind::circle) return kTwoPi * z;
  if (z <= bottom()) return 0.0;
  return 2.0 * well_integral(*this, z, [](double gap) { return std::sqrt(gap); });
}

double ScalarMonodromy::period(double z) const {
  if (kind_ == Kind::circle) return kTwoPi;
  if (z <= bottom()) throw PreconditionError("period: energy at or below the bottom of the well");
  return well_integral(*this, z, [](double gap) { return gap > 0.0 ? 1.0 / std::sqrt(gap) : 0.0; });
}

std::array<double, 4> ScalarMonodromy::action_jet(double z) const {
  if (kind_ == Kind::circle) return {kTwoPi * z, kTwoPi, 0.0, 0.0};
  const double d = 1e-3 * std::max(1e-6, z - bottom());
  const double tm = period(z - d), t0 = period(z), tp = period(z + d);
  return {action(z), t0, (tp - tm) / (2.0 * d), (tp - 2.0 * t0 + tm) / (d * d)};
}

Complex ScalarMonodromy::action(Complex z) const {
  const auto j = action_jet(z.real());
  const Complex iy(0.0, z.imag());
  return j[0] + j[1] * iy + j[2] * iy * iy / 2.0 + j[3] * iy * iy * iy / 6.0;
}

Complex ScalarMonodromy::action_derivative(Complex z) const {
  const auto j = action_jet(z.real());
  const Complex iy(0.0, z.imag());
  return j[1] + j[2] * iy + j[3] * iy * iy / 2.0;
}

void ScalarMonodromy::check_admissible(Complex z) const {
  const double strip = strip_half_width();
  if (std::abs(z.imag()) > strip * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "scalar_monodromy: |Im z| = " << std::abs(z.imag()) << " outside the strip |Im z| <= L h log(1/h) = "
       << strip;
    throw PreconditionError(os.str());
  }
  if (kind_ == Kind::well && z.real() <= bottom()) {
    std::ostringstream os;
    os << "scalar_monodromy: Re z = " << z.real() << " below the bottom of the well " << bottom();
    throw PreconditionError(os.str());
  }
}

Complex scalar_monodromy(const ScalarMonodromy& mono, Complex z) {
  mono.check_admissible(z);
  return std::exp(Complex(0.0, 1.0) * (mono.action(z) / mono.h() + mono.maslov_phase()));
}

std::vector<double> bohr_sommerfeld_eigenvalues(const ScalarMonodromy& mono, double z_lo, double z_hi) {
  if (!(z_lo < z_hi)) throw PreconditionError("bohr_sommerfeld_eigenvalues: empty window");
  std::vector<double> out;
  if (mono.kind() == ScalarMonodromy::Kind::well) {
    if (z_hi <= mono.bottom()) return out;
    z_lo = std::max(z_lo, mono.bottom());
  }
  // I must increase through the window (dI/dz = T > 0).
  const int probes = 64;
  for (int i = 0; i <= probes; ++i) {
    double z = z_lo + (z_hi - z_lo) * i / probes;
    if (mono.kind() == ScalarMonodromy::Kind::well && z <= mono.bottom()) z = mono.bottom() + 1e-9 * (z_hi - z_lo);
    if (!(mono.period(z) > 0.0)) {
      std::ostringstream os;
      os << "bohr_sommerfeld_eigenvalues: action not increasing near z = " << z;
      throw PreconditionError(os.str());
    }
  }
  const double h = mono.h();
  auto phase = [&](double z) { return mono.action(z) / h + mono.maslov_phase(); };
  const double plo = phase(z_lo), phi = phase(z_hi);
  const long n_lo = static_cast<long>(std::ceil(plo / kTwoPi));
  const long n_hi = static_cast<long>(std::floor(phi / kTwoPi));
  for (long n = n_lo; n <= n_hi; ++n) {
    auto g = [&](double z) { return phase(z) - kTwoPi * static_cast<double>(n); };
    const double glo = g(z_lo), ghi = g(z_hi);
    if (glo == 0.0) {
      out.push_back(z_lo);
      continue;
    }
    if (ghi == 0.0) {
      out.push_back(z_hi);
      continue;
    }
    out.push_back(solve_increasing(g, z_lo, z_hi));
  }
  return out;
}

// ---------------------------------------------------------------------------

GutzwillerResult gutzwiller_sum(const ClosedOrbit& orbit, const TestFunction& f, const EnergyWindow& chi,
                                double h, int N, double det_tol) {
  if (h <= 0.0) throw PreconditionError("gutzwiller_sum: h must be positive");
  if (N < 1) throw PreconditionError("gutzwiller_sum: N must be at least 1");
  if (f.support_contains_zero()) throw PreconditionError("gutzwiller_sum: 0 lies in supp fhat");
  const auto& dc = orbit.reduced_monodromy();
  std::vector<int> bad;
  std::map<int, double> dets;
  for (const auto& e : check_nondegeneracy(dc, N, det_tol)) {
    dets[e.k] = e.det;
    if (!e.pass) bad.push_back(e.k);
  }
  if (!bad.empty()) {
    std::ostringstream os;
    os << "gutzwiller_sum: orbit degenerate, det(dC^k - I) ~ 0 for k =";
    for (int k : bad) os << ' ' << k;
    throw PreconditionError(os.str());
  }
  GutzwillerResult out;
  out.value = 0.0;
  const double t = orbit.period(), s = orbit.action();
  const double cz = chi(orbit.energy());
  for (int k = -N; k <= N; ++k) {
    if (k == 0) continue;  // fhat(0) = 0 by the support condition
    const Complex fh = f.fhat(-k * t);
    const double amp = t / std::sqrt(std::abs(dets.at(k)));
    const double ph = k * s / h + orbit.maslov(k) * kPi / 2.0;
    const Complex v = std::polar(1.0, ph) * amp * fh * cz / kTwoPi;
    out.terms.push_back({k, amp, ph, v});
    out.value += v;
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct FioData {
  int s;
  double det;  // det beta det(dkappa - I)
};

FioData fio_data(const QuadraticPhase& phase) {
  const auto dk = dkappa_from_phase(phase);
  const int n = phase.n();
  const double ddk = (dk.matrix() - Matrix::Identity(2 * n, 2 * n)).determinant();
  if (std::abs(ddk) < 1e-8) {
    std::ostringstream os;
    os << "fio_trace: degenerate fixed point, det(dkappa - I) = " << ddk;
    throw PreconditionError(os.str());
  }
  return {signature(phase.bordered_hessian()).value(), phase.xeta.determinant() * ddk};
}

}  // namespace

Complex fio_trace_sp(const QuadraticPhase& phase, Complex b0, double h) {
  if (h <= 0.0) throw PreconditionError("fio_trace_sp: h must be positive");
  const auto d = fio_data(phase);
  return std::polar(1.0, kPi * d.s / 4.0 + phase.value0 / h) * b0 / std::sqrt(std::abs(d.det));
}

int fio_required_nodes(const QuadraticPhase& phase, double h, double half_width) {
  const int n = phase.n();
  Eigen::JacobiSVD<Matrix> svd(phase.bordered_hessian());
  const double omega = svd.singularValues()(0) * half_width * std::sqrt(2.0 * n) / h;
  const double need = 10.0 * 2.0 * half_width * omega / kTwoPi;
  const int panels = std::max(1, static_cast<int>(std::ceil(need / 20.0)));
  return 20 * panels;
}

Complex fio_trace_quadrature(const QuadraticPhase& phase, const Amplitude& b, double h, const FioGrid& grid) {
  if (h <= 0.0) throw PreconditionError("fio_trace_quadrature: h must be positive");
  if (grid.half_width <= 0.0) throw PreconditionError("fio_trace_quadrature: grid half width must be positive");
  const int n = phase.n();
  const int need = fio_required_nodes(phase, h, grid.half_width);
  const int nodes = grid.nodes == 0 ? need : grid.nodes;
  if (nodes < need || nodes % 20) {
    std::ostringstream os;
    os << "fio_trace_quadrature: " << nodes << " nodes per dimension do not resolve the phase at h = " << h
       << " (need a multiple of 20, at least " << need << ")";
    throw PreconditionError(os.str());
  }
  const double total = std::pow(static_cast<double>(nodes), 2 * n);
  if (total > 2e9) {
    std::ostringstream os;
    os << "fio_trace_quadrature: tensor grid of " << total << " points exceeds the budget of 2e9";
    throw PreconditionError(os.str());
  }
  const auto rule = composite_rule(-grid.half_width, grid.half_width, nodes / 20);
  const Matrix hess = phase.bordered_hessian();
  Vector x(n), eta(n), v(2 * n);
  std::vector<int> idx(2 * n, 0);
  Complex sum = 0.0;
  if (n == 1) {
    // phi - x eta = value0 + a x^2/2 + (b - 1) x eta + c eta^2/2
    const double a = hess(0, 0), c = hess(1, 1), cross = hess(0, 1);
    std::vector<Complex> ex(nodes), ee(nodes);
    for (int i = 0; i < nodes; ++i) {
      const double q = rule.nodes[i];
      ex[i] = rule.weights[i] * std::polar(1.0, 0.5 * a * q * q / h);
      ee[i] = rule.weights[i] * std::polar(1.0, 0.5 * c * q * q / h);
    }
    for (int i = 0; i < nodes; ++i) {
      x(0) = rule.nodes[i];
      Complex row = 0.0;
      for (int j = 0; j < nodes; ++j) {
        eta(0) = rule.nodes[j];
        row += ee[j] * std::polar(1.0, cross * x(0) * eta(0) / h) * b(x, eta);
      }
      sum += ex[i] * row;
    }
  } else {
    // odometer over the 2n-dimensional tensor grid
    while (true) {
      double w = 1.0;
      for (int d = 0; d < 2 * n; ++d) {
        v(d) = rule.nodes[idx[d]];
        w *= rule.weights[idx[d]];
      }
      x = v.head(n);
      eta = v.tail(n);
      sum += w * std::polar(1.0, 0.5 * v.dot(hess * v) / h) * b(x, eta);
      int d = 0;
      while (d < 2 * n && ++idx[d] == nodes) idx[d++] = 0;
      if (d == 2 * n) break;
    }
  }
  return sum * std::polar(1.0, phase.value0 / h) / std::pow(kTwoPi * h, n);
}

// ---------------------------------------------------------------------------

MonodromyIntegral monodromy_trace_integral(const ScalarMonodromy& mono, const TestFunction& g,
                                           const EnergyWindow& chi, int k, double z0) {
  if (k < 1) throw PreconditionError("monodromy_trace_integral: k must be positive");
  if (chi.is_zero()) return {0.0, 0.0};
  const double h = mono.h();
  auto [a, b] = chi.support();
  if (mono.kind() == ScalarMonodromy::Kind::well && a <= mono.bottom()) {
    std::ostringstream os;
    os << "monodromy_trace_integral: supp chi reaches below the bottom of the well (" << a << " <= " << mono.bottom()
       << ")";
    throw PreconditionError(os.str());
  }
  double tmax = 0.0;
  for (int i = 0; i <= 16; ++i) tmax = std::max(tmax, mono.period(a + (b - a) * (i + 0.5) / 17.0));
  const double omega = (k * tmax + g.reach()) / h;
  const int panels = 8 + static_cast<int>(std::ceil((b - a) * omega / kTwoPi / 2.0));
  // ghat(lambda) = 2 pi f(-lambda); M^{k-1} M' / (2 pi i) = M^k I'(z) / (2 pi h).
  const Complex lhs = integrate_composite(
      [&](double z) -> Complex {
        const double ph = k * (mono.action(z) / h + mono.maslov_phase());
        return g(-(z - z0) / h) * std::polar(1.0, ph) * mono.period(z) * chi(z) / h;
      },
      a, b, panels);
  const double t0 = mono.period(z0);
  const Complex rhs =
      std::polar(1.0, k * (mono.action(z0) / h + mono.maslov_phase())) * t0 * chi(z0) * g.fhat(k * t0);
  return {lhs, rhs};
}

}  // namespace semitrace
