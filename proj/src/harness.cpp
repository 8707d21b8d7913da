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


#include "semitrace/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "semitrace/dynamics.hpp"
#include "semitrace/orbit.hpp"
#include "semitrace/spectra.hpp"
#include "semitrace/trace_engine.hpp"
#include "semitrace/weyl.hpp"

#ifndef SEMITRACE_VERSION
#define SEMITRACE_VERSION "0.1.0"
#endif

namespace semitrace {

using json = nlohmann::ordered_json;

const char* semitrace_version() { return SEMITRACE_VERSION; }

namespace {

struct RowOut {
  ReportRow row;
  json detail = json::object();
  bool ok = true;
};

struct Plan {
  std::function<RowOut(double)> row;
  json extra = json::object();
  std::vector<std::string> notes;
  double est_seconds = 0.0;  // rough cost of the whole sweep
  // Extra pass rule over the finished rows (h order); may add notes.
  std::function<bool(const std::vector<RowOut>&, std::vector<std::string>&)> finish;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double rel_to(Complex a, Complex ref) {
  const double d = std::abs(a - ref);
  return std::abs(ref) > 0.0 ? d / std::abs(ref) : d;
}

RowOut make_row(double h, Complex lhs, Complex rhs, double rel) {
  RowOut r;
  r.row.h = h;
  r.row.lhs = lhs;
  r.row.rhs = rhs;
  r.row.abs_err = std::abs(lhs - rhs);
  r.row.rel_err = rel;
  return r;
}

json cjson(Complex c) { return json::array({c.real(), c.imag()}); }

TestFunction make_f(const ExperimentConfig& c, const std::string& p) {
  const double t0 = c.get_double(p + ".center");
  const double d = c.get_double(p + ".half_width");
  Complex amp = 1.0;
  if (c.has(p + ".amp_re")) amp = Complex(c.get_double(p + ".amp_re"), c.get_double(p + ".amp_im"));
  if (c.has(p + ".real") && c.get_bool(p + ".real")) return TestFunction::real_pair(t0, d, amp);
  return TestFunction::bump(t0, d, amp);
}

EnergyWindow make_chi(const ExperimentConfig& c, const std::string& p) {
  return EnergyWindow(c.get_double(p + ".lower"), c.get_double(p + ".upper"), c.get_double(p + ".rolloff"));
}

Potential make_potential(const ExperimentConfig& c) {
  const std::string name = c.get_string("model.potential");
  const double k = c.get_double("model.coefficient");
  if (!(k > 0.0)) throw ConfigError("config: 'model.coefficient' must be positive");
  if (name == "harmonic") return harmonic_potential(k);
  if (name == "quartic") return quartic_potential(k);
  throw ConfigError("config: 'model.potential' = '" + name + "' (harmonic or quartic)");
}

OrbitOptions orbit_options(const ExperimentConfig& c) {
  OrbitOptions o;
  o.orbit_tol = c.get_double("orbit.tol");
  o.integrator_tol = c.get_double("orbit.integrator_tol");
  o.max_iterations = c.get_int("orbit.max_iterations");
  o.samples = c.get_int("orbit.samples");
  return o;
}

// Seeded uniform perturbation of an initial guess.
Vector jitter(Vector v, double size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-size, size);
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) += u(rng);
  return v;
}

// Two-dof models: guess on the x_mode axis at energy z.
Vector mode_guess(int mode, double w1, double w2, double z) {
  if (mode != 1 && mode != 2) throw ConfigError("config: 'model.mode' must be 1 or 2");
  Vector g = Vector::Zero(4);
  g(mode - 1) = std::sqrt(2.0 * z) / (mode == 1 ? w1 : w2);
  return g;
}

json orbit_summary(const ClosedOrbit& orbit, int N, double det_tol) {
  json o;
  o["energy"] = orbit.energy();
  o["period"] = orbit.period();
  o["action"] = orbit.action();
  o["residual"] = orbit.residual();
  o["newton_iterations"] = orbit.newton_iterations();
  o["turning_points"] = orbit.turning_points();
  json nu = json::object();
  for (const auto& [k, v] : orbit.maslov()) nu[std::to_string(k)] = v;
  o["maslov"] = nu;
  json dets = json::array();
  for (const auto& e : check_nondegeneracy(orbit.reduced_monodromy(), N, det_tol))
    dets.push_back({{"k", e.k}, {"det", e.det}, {"pass", e.pass}});
  o["det_dC_k_minus_I"] = dets;
  const Matrix j = standard_form(orbit.system().dof());
  double defect = 0.0;
  for (const auto& s : orbit.samples())
    defect = std::max(defect, (s.variational.transpose() * j * s.variational - j).norm());
  o["symplectic_defect"] = defect;
  return o;
}

Plan plan_poisson(const ExperimentConfig& c) {
  Plan p;
  const auto f = make_f(c, "f");
  const int N = c.get_int("N");
  const double tol = c.get_double("tolerance");
  p.row = [f, N, tol](double h) {
    const auto r = poisson_both_sides(f, h, N);
    RowOut out = make_row(h, r.lhs, r.rhs, std::abs(r.lhs - r.rhs) / (1.0 + std::abs(r.lhs)));
    json terms = json::array();
    double worst = 0.0;
    for (const auto& t : r.terms) {
      const double e = std::abs(t.quadrature - t.exact);
      worst = std::max(worst, e);
      terms.push_back({{"k", t.k}, {"quadrature", cjson(t.quadrature)}, {"exact", cjson(t.exact)}, {"err", e}});
    }
    out.detail["truncation"] = r.truncation;
    out.detail["terms"] = terms;
    out.detail["max_term_err"] = worst;
    out.ok = worst <= tol;
    return out;
  };
  return p;
}

Plan plan_gutzwiller(const ExperimentConfig& c) {
  Plan p;
  const double w1 = c.get_double("model.w1"), w2 = c.get_double("model.w2");
  const double z = c.get_double("model.z");
  const int mode = c.get_int("model.mode");
  const int N = c.get_int("N");
  const double det_tol = c.get_double("orbit.det_tol");
  const auto f = make_f(c, "f");
  const auto chi = make_chi(c, "chi");
  if (!(w1 > 0.0 && w2 > 0.0 && z > 0.0)) throw ConfigError("config: model.w1, model.w2, model.z must be positive");

  const auto sys = anisotropic_oscillator(w1, w2);
  const Vector guess = jitter(mode_guess(mode, w1, w2, z), c.get_double("model.guess_jitter"), c.seed());
  const auto orbit = find_closed_orbit(sys, z, guess, SectionSpec::orthogonal(sys, z, guess), N, orbit_options(c));

  // Every closed orbit of the oscillator at energy z is a normal mode (w1/w2 irrational).
  std::vector<PeriodPoint> periods;
  const double other = kTwoPi / (mode == 1 ? w2 : w1);
  const double reach = f.reach() + c.get_double("isolation.margin");
  for (int k = 1; k * std::min(orbit.period(), other) <= reach + 1e-12; ++k) {
    for (int s : {1, -1}) {
      const std::string sign = s > 0 ? "" : "-";
      if (k * orbit.period() <= reach)
        periods.push_back({"-k T with k=" + sign + std::to_string(k) + " (x" + std::to_string(mode) + " mode, T=" +
                               fmt(orbit.period()) + ")",
                           -s * k * orbit.period()});
      if (k * other <= reach)
        periods.push_back({"-k T with k=" + sign + std::to_string(k) + " (x" + std::to_string(3 - mode) +
                               " mode, T=" + fmt(other) + ")",
                           -s * k * other});
    }
  }
  check_period_isolation(f.support(), periods, c.get_double("isolation.margin"));

  p.extra["orbit"] = orbit_summary(orbit, N, det_tol);
  const double e_max = chi.support().second + 0.1;
  p.row = [=](double h) {
    const auto spec = model_spectrum(SpectralModel::oscillator(w1, w2, h, e_max));
    const Complex lhs = spectral_trace(spec, f, chi, h, z);
    const auto g = gutzwiller_sum(orbit, f, chi, h, N, det_tol);
    RowOut out = make_row(h, lhs, g.value, rel_to(g.value, lhs));
    json terms = json::array();
    for (const auto& t : g.terms)
      terms.push_back({{"k", t.k}, {"amplitude", t.amplitude}, {"phase", t.phase}, {"value", cjson(t.value)}});
    out.detail["terms"] = terms;
    out.detail["eigenvalues"] = spec.values.size();
    return out;
  };
  return p;
}

Plan plan_bohr(const ExperimentConfig& c) {
  Plan p;
  const auto v = make_potential(c);
  const double lo = c.get_double("window.lower"), hi = c.get_double("window.upper");
  const std::string ref = c.get_string("reference");
  const double margin = c.get_double("spectrum.margin");
  const double k = c.get_double("model.coefficient");
  const bool harmonic = c.get_string("model.potential") == "harmonic";
  if (ref != "analytic" && ref != "numerical")
    throw ConfigError("config: 'reference' = '" + ref + "' (analytic or numerical)");
  if (ref == "analytic" && !harmonic) throw ConfigError("config: 'reference' = 'analytic' needs model.potential = harmonic");
  p.row = [=](double h) {
    const auto mono = ScalarMonodromy::well(v, h);
    // Whole ladder from the bottom so that list index = quantum number.
    const auto all = bohr_sommerfeld_eigenvalues(mono, mono.bottom(), hi);
    std::vector<double> reference;
    if (ref == "analytic") {
      for (std::size_t n = 0; n < all.size(); ++n) reference.push_back(2.0 * h * std::sqrt(k) * (n + 0.5));
    } else {
      const auto spec = model_spectrum(SpectralModel::schrodinger(v, h, hi + margin));
      reference = spec.values;
    }
    if (reference.size() < all.size())
      throw NumericalError("bohr: reference spectrum has fewer levels than the Bohr-Sommerfeld ladder");
    json table = json::array();
    double worst = 0.0;
    std::size_t at = 0;
    for (std::size_t n = 0; n < all.size(); ++n) {
      if (all[n] < lo) continue;
      const double e = std::abs(all[n] - reference[n]);
      if (table.empty() || e > worst) {
        worst = e;
        at = n;
      }
      table.push_back({{"n", n}, {"bohr_sommerfeld", all[n]}, {"reference", reference[n]}, {"err", e}});
    }
    if (table.empty()) {
      RowOut out = make_row(h, 0.0, 0.0, 0.0);
      out.detail["levels"] = table;
      return out;
    }
    RowOut out = make_row(h, all[at], reference[at], worst);
    out.detail["levels"] = table;
    return out;
  };
  return p;
}

Plan plan_fio(const ExperimentConfig& c) {
  Plan p;
  const QuadraticPhase phi(Matrix::Constant(1, 1, c.get_double("phase.alpha")),
                           Matrix::Constant(1, 1, c.get_double("phase.beta")),
                           Matrix::Constant(1, 1, c.get_double("phase.gamma")), c.get_double("phase.value0"));
  const Complex b0 = c.get_double("amplitude.b0");
  const double w = c.get_double("amplitude.width");
  if (!(w > 0.0)) throw ConfigError("config: 'amplitude.width' must be positive");
  const FioGrid grid{c.get_double("grid.half_width"), c.get_int("grid.nodes")};
  const Amplitude b = [b0, w](const Vector& x, const Vector& eta) {
    return b0 * std::exp(-(x.squaredNorm() + eta.squaredNorm()) / (w * w));
  };
  for (double h : c.h_list()) {
    const int nodes = std::max(grid.nodes, fio_required_nodes(phi, h, grid.half_width));
    p.est_seconds += 2e-8 * nodes * double(nodes);
  }
  p.row = [=](double h) {
    const Complex sp = fio_trace_sp(phi, b0, h);
    const Complex q = fio_trace_quadrature(phi, b, h, grid);
    RowOut out = make_row(h, q, sp, rel_to(sp, q));
    out.detail["phase_diff"] = std::abs(std::arg(sp / q));
    return out;
  };
  const double max_diff = c.get_double("phase.max_diff");
  p.finish = [max_diff](const std::vector<RowOut>& rows, std::vector<std::string>& notes) {
    const double d = rows.back().detail["phase_diff"].get<double>();
    const bool ok = d <= max_diff;
    notes.push_back("fio-trace: phase of sp vs quadrature at the smallest h differs by " + fmt(d) + " rad" +
                    (ok ? "" : " (above phase.max_diff)"));
    return ok;
  };
  return p;
}

double weyl_bump(double s) { return std::abs(s) < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0; }

Plan plan_weyl(const ExperimentConfig& c) {
  Plan p;
  const std::string sym = c.get_string("weyl.symbol");
  const double wx = c.get_double("weyl.symbol_x_width"), wxi = c.get_double("weyl.symbol_xi_width");
  if (!(wx > 0.0 && wxi > 0.0)) throw ConfigError("config: weyl symbol widths must be positive");
  Symbol a;
  if (sym == "gaussian")
    a = [wx, wxi](double x, double xi) { return std::exp(-x * x / (wx * wx) - xi * xi / (wxi * wxi)); };
  else if (sym == "bump")
    a = [wx, wxi](double x, double xi) { return weyl_bump(x / wx) * std::exp(-xi * xi / (wxi * wxi)); };
  else
    throw ConfigError("config: 'weyl.symbol' = '" + sym + "' (gaussian or bump)");

  const std::string kind = c.get_string("weyl.kappa");
  Diffeomorphism kappa;
  if (kind == "wiggle") {
    const double amp = c.get_double("weyl.kappa_amplitude"), w = c.get_double("weyl.kappa_width");
    // monotone iff 2 |amp| max|x e^{-x^2/w^2}| / w^2 < 1
    if (!(w > 0.0) || std::abs(amp) * std::sqrt(2.0) * std::exp(-0.5) / w >= 1.0)
      throw ConfigError("config: weyl.kappa_amplitude too large for a diffeomorphism");
    kappa = {[amp, w](double x) { return x + amp * std::exp(-x * x / (w * w)); },
             [amp, w](double x) { return 1.0 - 2.0 * amp * x / (w * w) * std::exp(-x * x / (w * w)); },
             {}};
  } else if (kind == "affine") {
    const double s = c.get_double("weyl.affine_scale");
    if (!(s > 0.0)) throw ConfigError("config: 'weyl.affine_scale' must be positive");
    kappa = {[s](double x) { return s * x; }, [s](double) { return s; }, [s](double y) { return y / s; }};
  } else if (kind == "identity") {
    kappa = {[](double x) { return x; }, [](double) { return 1.0; }, [](double y) { return y; }};
  } else {
    throw ConfigError("config: 'weyl.kappa' = '" + kind + "' (wiggle, affine or identity)");
  }
  const double hw = c.get_double("weyl.half_width");
  const WeylGrid grid{-hw, hw, c.get_int("weyl.grid_n")};
  const double xs = c.get_double("weyl.xi_support"), interior = c.get_double("weyl.interior");
  // about 4.8 s per h at n = 1210 on one core, cubic in n
  p.est_seconds = 4.8 * std::pow(grid.n / 1210.0, 3) * c.h_list().size();
  p.notes.push_back("weyl-check: lhs is the residual norm, rhs is 0, rel_err is the absolute residual");
  p.row = [=](double h) {
    const double r = weyl_invariance_residual(a, kappa, h, grid, xs, interior);
    return make_row(h, r, 0.0, r);
  };
  return p;
}

Plan plan_orbit(const ExperimentConfig& c) {
  Plan p;
  const std::string kind = c.get_string("model.kind");
  const double z = c.get_double("model.z");
  const int N = c.get_int("N");
  const double det_tol = c.get_double("orbit.det_tol");
  const double jit = c.get_double("model.guess_jitter");
  const auto opts = orbit_options(c);
  const std::uint64_t seed = c.seed();

  std::function<HamiltonianSystem()> make_sys;
  std::function<Vector(double)> guess_at;
  if (kind == "well") {
    const auto v = make_potential(c);
    const double k = c.get_double("model.coefficient");
    const bool harmonic = c.get_string("model.potential") == "harmonic";
    make_sys = [v] { return well_system(v); };
    guess_at = [k, harmonic](double e) {
      Vector g = Vector::Zero(2);
      g(0) = harmonic ? std::sqrt(e / k) : std::pow(e / k, 0.25);
      return g;
    };
  } else if (kind == "oscillator" || kind == "coupled_quartic") {
    const double w1 = c.get_double("model.w1"), w2 = c.get_double("model.w2");
    const double eps = kind == "oscillator" ? 0.0 : c.get_double("model.eps");
    const int mode = c.get_int("model.mode");
    make_sys = [=] { return kind == "oscillator" ? anisotropic_oscillator(w1, w2) : coupled_quartic(w1, w2, eps); };
    guess_at = [=](double e) { return mode_guess(mode, w1, w2, e); };
  } else {
    throw ConfigError("config: 'model.kind' = '" + kind + "' (well, oscillator or coupled_quartic)");
  }
  if (!(z > 0.0)) throw ConfigError("config: 'model.z' must be positive");

  auto orbit_at = [=](double e) {
    const auto sys = make_sys();
    const Vector g = jitter(guess_at(e), jit, seed);
    return find_closed_orbit(sys, e, g, SectionSpec::orthogonal(sys, e, g), N, opts);
  };
  const auto base = orbit_at(z);
  json summary = orbit_summary(base, N, det_tol);
  summary["integrator_tol"] = opts.integrator_tol;
  if (base.system().dof() >= 2) {
    // a second, tilted section through the same point
    Vector normal = base.section().normal;
    for (Eigen::Index i = 0; i < normal.size(); ++i) normal(i) += 0.3 * (i % 2 == 0 ? 1.0 : -1.0);
    const SectionSpec tilted{base.point(), normal};
    const auto a = check_nondegeneracy(base.reduced_monodromy(), N, det_tol);
    const auto b = check_nondegeneracy(reduce_monodromy(base, tilted), N, det_tol);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, std::abs(std::abs(a[i].det) - std::abs(b[i].det)) / std::max(1.0, std::abs(a[i].det)));
    summary["section_independence"] = worst;
  }
  p.extra["orbit"] = summary;
  p.notes.push_back("orbit: h is the finite-difference step in z; lhs = (I(z+h) - I(z-h))/2h, rhs = T(z)");
  const double t = base.period();
  p.row = [=](double h) {
    if (!(h < z)) throw ConfigError("config: orbit step h must be below model.z");
    const double d = (orbit_at(z + h).action() - orbit_at(z - h).action()) / (2.0 * h);
    return make_row(h, d, t, std::abs(d - t) / t);
  };
  return p;
}

Plan plan_monodromy(const ExperimentConfig& c) {
  Plan p;
  const std::string kind = c.get_string("model.kind");
  if (kind != "circle" && kind != "well") throw ConfigError("config: 'model.kind' = '" + kind + "' (circle or well)");
  std::optional<Potential> v;
  if (kind == "well") v = make_potential(c);
  const auto g = make_f(c, "g");
  const auto chi = make_chi(c, "chi");
  const int k = c.get_int("k");
  if (k < 1) throw ConfigError("config: 'k' must be a positive integer");
  const double z0 = c.get_double("z0");
  p.row = [=](double h) {
    const auto mono = v ? ScalarMonodromy::well(*v, h) : ScalarMonodromy::circle(h);
    const auto r = monodromy_trace_integral(mono, g, chi, k, z0);
    return make_row(h, r.lhs, r.rhs, rel_to(r.lhs, r.rhs));
  };
  return p;
}

Plan make_plan(const ExperimentConfig& c) {
  const std::string& e = c.experiment();
  if (e == "poisson") return plan_poisson(c);
  if (e == "gutzwiller") return plan_gutzwiller(c);
  if (e == "bohr") return plan_bohr(c);
  if (e == "fio-trace") return plan_fio(c);
  if (e == "weyl-check") return plan_weyl(c);
  if (e == "orbit") return plan_orbit(c);
  if (e == "monodromy-integral") return plan_monodromy(c);
  throw ConfigError("config: unknown experiment '" + e + "'");
}

// Workers pull (index) jobs; results land in their h slot, so the order is fixed.
std::vector<RowOut> run_rows(const Plan& plan, const std::vector<double>& hs, int threads) {
  std::vector<RowOut> out(hs.size());
  std::vector<std::exception_ptr> errors(hs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < hs.size(); i = next++) {
      try {
        const auto t0 = std::chrono::steady_clock::now();
        out[i] = plan.row(hs[i]);
        out[i].row.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(hs.size())));
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace

SlopeFit fit_slope(const std::vector<double>& h, const std::vector<double>& err, double min_r2) {
  const std::size_t n = h.size();
  if (n < 3 || err.size() != n) throw PreconditionError("fit_slope: needs at least 3 (h, err) pairs");
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(h[i] > 0.0 && err[i] > 0.0)) throw PreconditionError("fit_slope: h and err must be positive");
    x[i] = std::log(h[i]);
    y[i] = std::log(err[i]);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i] / n;
    my += y[i] / n;
  }
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  SlopeFit fit;
  fit.value = sxy / sxx;
  double sse = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - my - fit.value * (x[i] - mx);
    sse += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  const boost::math::students_t dist(static_cast<double>(n - 2));
  fit.half_width = boost::math::quantile(dist, 0.975) * std::sqrt(sse / (n - 2) / sxx);
  fit.conclusive = fit.r2 >= min_r2;
  return fit;
}

void check_period_isolation(const std::vector<std::pair<double, double>>& support,
                            const std::vector<PeriodPoint>& periods, double margin) {
  std::vector<std::string> hit;
  for (const auto& p : periods)
    for (const auto& [a, b] : support)
      if (p.t >= a - margin && p.t <= b + margin) {
        hit.push_back(p.label);
        break;
      }
  if (hit.size() <= 1) return;
  std::string msg = "period isolation: supp fhat (margin " + fmt(margin) + ") meets several periods:";
  for (std::size_t i = 0; i < hit.size(); ++i) msg += (i ? "; " : " ") + hit[i];
  throw PreconditionError(msg);
}

TraceReport run_experiment(const ExperimentConfig& config) {
  config.validate();
  TraceReport rep;
  rep.experiment = config.experiment();
  rep.config_hash = config.hash();
  rep.version = semitrace_version();
  rep.seed = config.seed();
  rep.tolerance = config.get_double("tolerance");
  if (!config.is_none("slope.target")) rep.slope_target = config.get_double("slope.target");
  rep.slope_tolerance = config.get_double("slope.tolerance");

  const Plan plan = make_plan(config);
  rep.notes = plan.notes;
  rep.extra = plan.extra;
  if (plan.est_seconds > 120.0)
    rep.notes.push_back("warning: estimated runtime " + fmt(plan.est_seconds) + " s exceeds the 2 minute budget");

  const auto hs = config.h_list();
  const auto out = run_rows(plan, hs, config.get_int("run.threads"));
  bool rows_ok = true;
  json per_h = json::array();
  std::vector<double> errs;
  for (const auto& o : out) {
    rep.rows.push_back(o.row);
    errs.push_back(o.row.rel_err);
    rows_ok = rows_ok && o.ok && o.row.rel_err <= rep.tolerance;
    if (!o.detail.empty()) {
      json d{{"h", o.row.h}};
      d.update(o.detail);
      per_h.push_back(d);
    }
  }
  if (!per_h.empty()) rep.extra["per_h"] = per_h;
  if (plan.finish) rows_ok = plan.finish(out, rep.notes) && rows_ok;

  const double floor = config.get_double("slope.exact_floor");
  bool slope_ok = true;
  if (std::all_of(errs.begin(), errs.end(), [&](double e) { return e <= floor; })) {
    rep.exact_identity = true;
    rep.notes.push_back("exact identity: every error is at the quadrature floor (<= " + fmt(floor) + "), no slope");
  } else if (hs.size() >= 3) {
    std::vector<double> clamped;
    for (double e : errs) clamped.push_back(std::max(e, floor));
    if (clamped != errs) rep.notes.push_back("errors below the floor were clamped to it for the fit");
    rep.slope = fit_slope(hs, clamped, config.get_double("slope.min_r2"));
    if (!rep.slope->conclusive) {
      rep.notes.push_back("slope inconclusive: R^2 = " + fmt(rep.slope->r2) + " below slope.min_r2");
    } else if (rep.slope_target) {
      slope_ok = std::abs(rep.slope->value - *rep.slope_target) <= rep.slope_tolerance;
    }
  } else if (rep.slope_target) {
    rep.notes.push_back("slope target skipped: fewer than 3 h values");
  }
  rep.pass = rows_ok && slope_ok;
  return rep;
}

TraceReport convergence_study(const ExperimentConfig& config) {
  const auto hs = config.h_list();
  if (hs.size() < 3) throw ConfigError("convergence study: 'h_list' needs at least 3 values");
  if (hs.front() / hs.back() < 4.0 - 1e-12) throw ConfigError("convergence study: 'h_list' must span a factor of 4");
  if (config.is_none("slope.target")) throw ConfigError("convergence study: 'slope.target' is none");
  return run_experiment(config);
}

}  // namespace semitrace
