// Acceptance checks. One PASS/FAIL line per criterion; nonzero exit if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qfh/dispersion.hpp"
#include "qfh/error.hpp"
#include "qfh/fluid1d.hpp"
#include "qfh/linear_response.hpp"
#include "qfh/moments.hpp"
#include "qfh/params.hpp"
#include "qfh/traveling.hpp"
#include "qfh/wigner_free.hpp"

using namespace qfh;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

PlasmaParams nondim(double T, double hbar) {
  auto p = nondimensional_preset();
  p.T0_par = T;
  p.T0_perp = T;
  p.hbar = hbar;
  return p;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Small-k limit: least-squares fit of (eq14 − ωp²)/k² = a + b k² on the
// lowest decade of a three-decade sweep.
Outcome ac1() {
  const auto P = nondim(1e-3, 1.0);
  const auto pts = sweep(Relation::eq14, 1e-3, 1.0, 301, P, Spacing::log);
  std::vector<double> k2, y;
  for (const auto& pt : pts) {
    if (pt.k > 1e-2 * (1.0 + 1e-12)) break;
    k2.push_back(pt.k * pt.k);
    y.push_back(eq14_excess(pt.k, P) / (pt.k * pt.k));
  }
  Eigen::MatrixXd A(k2.size(), 2);
  Eigen::VectorXd b(k2.size());
  for (std::size_t i = 0; i < k2.size(); ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = k2[i];
    b(i) = y[i];
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
  const double want_a = 3.0 * P.kB * P.T0_par / P.m;
  const double want_b = P.hbar * P.hbar / (4.0 * P.m * P.m);
  const double ea = rel(c(0), want_a), eb = rel(c(1), want_b);
  return {ea < 1e-3 && eb < 1e-3,
          fmt("%zu points on k in [1e-3, 1e-2]: k2 coeff rel err %.2e, k4 coeff rel err %.2e",
              k2.size(), ea, eb)};
}

// Closure comparison at a warm, weakly quantum point.
Outcome ac2() {
  const auto P = nondim(0.1, 0.3);
  const double k = 0.5;
  const double wp2 = P.omega_p() * P.omega_p();
  const double bg = bohm_gross_omega_sq(k, P);
  const double g3 = adiabatic_gamma_omega_sq(k, P, 3.0);
  const double g53 = adiabatic_gamma_omega_sq(k, P, 5.0 / 3.0);
  const double ql = quantum_langmuir_omega_sq(k, P);
  const double tc = temperature_closure_omega_sq(k, P);
  const double e14 = eq14_omega_sq(k, P);
  const double thermal = P.kB * P.T0_par / P.m * k * k;
  const double quartic_ql = ql - bg;
  const double quartic_tc = tc - g53;
  const bool ok = g3 == bg && g53 < bg && std::abs((g53 - wp2) / thermal - 5.0 / 3.0) < 1e-14 &&
                  std::abs(quartic_tc / quartic_ql - 1.0 / 3.0) < 1e-12 && e14 <= ql &&
                  bg < ql && wp2 < g53;
  return {ok, fmt("k=%.2f: gamma5/3 %.12f < BG=gamma3 %.12f < QL %.12f; eq14 %.12f <= QL; "
                  "TC/QL quartic ratio %.15f",
                  k, g53, bg, ql, e14, quartic_tc / quartic_ql)};
}

// Fluid eigenmode runs against the closed-form Langmuir branch.
Outcome ac3() {
  const auto P = nondim(0.02, 0.6);
  std::string detail;
  bool ok = true;
  for (double k : {0.3, 0.6, 0.9, 1.1, 1.25}) {
    Fluid1DConfig cfg;
    cfg.N = 256;
    cfg.L = 2.0 * M_PI / k;
    cfg.filter = SpectralFilter::band;
    cfg.band_max_mode = 1;
    const Fluid1DSolver solver(P, cfg);
    const double want = std::sqrt(eq14_omega_sq(k, P));
    const auto s =
        perturbed_state(solver, {P.n0, 0.0, P.n0 * P.kB * P.T0_par, 0.0}, {1, 1e-6, true, {}});
    RunOptions opts;
    opts.t_end = 10.0 * 2.0 * M_PI / want;
    const auto res = run(solver, s, opts);
    const double got = measure_frequency(res.probes.n_mode, res.dt);
    const double e = rel(got, want);
    ok = ok && e < 1e-2;
    detail += fmt("%sk=%.2f w=%.6f/%.6f (%.1e)", detail.empty() ? "" : "; ", k, got, want, e);
  }
  return {ok, detail};
}

// Anisotropy generated by the wave.
Outcome ac4() {
  const double k = 0.8, T = 0.25;
  auto P = nondim(T, 0.0);
  const auto P0 = anisotropic_dyad(P.n0, T, T, P);
  const auto dc = delta_P({k, bohm_gross_omega_sq(k, P), 1e-3, P0, P});
  const double r_classical = dc(2, 2) / dc(0, 0);
  P.hbar = 0.7;
  const auto dq = delta_P({k, eq14_omega_sq(k, P), 1e-3, P0, P});
  const double r_quantum = dq(2, 2) / dq(0, 0);
  const double p0 = P.n0 * P.kB * T;
  const double want = 3.0 + P.n0 * P.hbar * P.hbar * k * k / (4.0 * P.m * p0);
  const double eps = std::numeric_limits<double>::epsilon();
  const bool ok = r_classical == 3.0 && rel(r_quantum, want) <= 4.0 * eps;
  return {ok, fmt("hbar=0 ratio %.17g; quantum ratio %.17g vs %.17g", r_classical, r_quantum,
                  want)};
}

// Equilibrium stability threshold in H.
Outcome ac5() {
  bool ok = true;
  std::string detail;
  for (double p0 : {0.0, 0.1, 0.5}) {
    const double Hc = stability_threshold(nondim_wave_frame, p0, 1.0, 3.0);
    ok = ok && std::abs(Hc - 2.0) <= 1e-6;
    detail += fmt("%sp0=%.1f H_crit=%.9f", detail.empty() ? "" : "; ", p0, Hc);
  }
  return {ok, detail};
}

// Bounded periodic traveling wave from the captioned initial data.
Outcome ac6() {
  const auto c = nondim_wave_frame(1.0);
  const auto t = integrate(fig23_initial_state(c), c, 300.0, {1e-9, 1e-12, 0.01});
  if (t.halt != HaltReason::completed) return {false, "trajectory halted: " + t.message};

  // Periods from upward zero crossings of ψ.
  std::vector<std::size_t> up;
  for (std::size_t i = 1; i < t.samples.size(); ++i)
    if (t.samples[i - 1].state.psi < 0.0 && t.samples[i].state.psi >= 0.0) up.push_back(i);
  if (up.size() < 21) return {false, fmt("only %zu periods", up.size() ? up.size() - 1 : 0)};

  const std::function<double(const TrajectorySample&)> fields[] = {
      [](const TrajectorySample& s) { return s.n; },
      [](const TrajectorySample& s) { return s.state.u; },
      [](const TrajectorySample& s) { return s.state.p; },
      [](const TrajectorySample& s) { return s.state.Q; },
      [](const TrajectorySample& s) { return -s.state.psi; }};
  const char* names[] = {"n", "u", "p", "Q", "E"};
  bool ok = true;
  std::string detail = fmt("%zu periods", up.size() - 1);
  for (int f = 0; f < 5; ++f) {
    double lo_amp = std::numeric_limits<double>::infinity(), hi_amp = 0.0, bound = 0.0;
    for (std::size_t j = 0; j + 1 < up.size(); ++j) {
      double lo = std::numeric_limits<double>::infinity(), hi = -lo;
      for (std::size_t i = up[j]; i < up[j + 1]; ++i) {
        const double v = fields[f](t.samples[i]);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      lo_amp = std::min(lo_amp, hi - lo);
      hi_amp = std::max(hi_amp, hi - lo);
      bound = std::max({bound, std::abs(lo), std::abs(hi)});
    }
    const double drift = (hi_amp - lo_amp) / hi_amp;
    ok = ok && std::isfinite(bound) && drift < 1e-2;
    detail += fmt("; %s amp %.4f drift %.1e", names[f], hi_amp, drift);
  }
  return {ok, detail};
}

// Wigner transform of the evolved packet on the default grid.
Outcome ac7() {
  const FreeParticle fp{1.0, 1.0, 1.0};
  const auto pg = fig1_phase_grid(fp);
  const auto x = pg.x.nodes();
  const auto v = pg.v.nodes();
  double err = 0.0, shear = 0.0, spread = 0.0;
  const auto g0 = evolve_free_gaussian(fp, 0.0, fig1_wavefunction_grid(fp));
  for (double tb : fig1_times) {
    const auto g = evolve_free_gaussian(fp, fp.time(tb), fig1_wavefunction_grid(fp));
    const auto table = rescale(wigner_transform(g, fp.mass, fp.hbar, x, v), fp);
    for (std::size_t i = 0; i < x.size(); ++i)
      for (std::size_t j = 0; j < v.size(); ++j)
        err = std::max(err, std::abs(table(i, j) - analytic_wigner({table.x[i], table.v[j], tb})));

    // Shear transport: each v̄ row is the t̄ = 0 row translated by v̄ t̄.
    std::vector<double> xs, vs, now;
    for (std::size_t i = 0; i < x.size(); i += 5)
      for (std::size_t j = 0; j < v.size(); j += 5) {
        xs.push_back(table.x[i] - table.v[j] * tb);
        vs.push_back(table.v[j]);
        now.push_back(table(i, j));
      }
    const auto then = wigner_at(g0, fp.mass, fp.hbar, xs, vs);
    for (std::size_t q = 0; q < now.size(); ++q)
      shear = std::max(shear, std::abs(now[q] - fp.f_scale() * then[q]));

    // Non-spreading: at fixed v̄ the x̄-width does not change.
    const double h = pg.x.step();
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (std::abs(table.v[j]) * tb > 4.0) continue;
      double m0 = 0.0, m1 = 0.0, m2 = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        m0 += table(i, j) * h;
        m1 += table(i, j) * table.x[i] * h;
        m2 += table(i, j) * table.x[i] * table.x[i] * h;
      }
      if (m0 < 1e-6) continue;
      const double var = m2 / m0 - (m1 / m0) * (m1 / m0);
      spread = std::max(spread, std::abs(var - 0.5));
    }
  }
  return {err < 1e-6 && shear < 1e-6 && spread < 1e-6,
          fmt("max |f - analytic| %.2e; shear identity %.2e; width drift at fixed v %.2e", err,
              shear, spread)};
}

// Velocity moments of the tabulated Wigner data against the packet's fluid fields.
Outcome ac8() {
  const FreeParticle fp{1.0, 1.0, 1.0};
  const auto pg = fig1_phase_grid(fp);
  const double vs = fp.velocity_scale();
  const GridSpec vgrid{-8.0 * vs, 8.0 * vs, 256};
  const auto v = vgrid.nodes();
  const auto xbar = pg.x.nodes();
  std::vector<double> x(xbar.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = xbar[i] * fp.sigma;
  const VelocityGrid grid({Axis::uniform(vgrid.lo, vgrid.hi, vgrid.count)});
  double en = 0.0, eu = 0.0, ep = 0.0;
  std::size_t used = 0;
  for (double tb : fig1_times) {
    const double t = fp.time(tb), s2 = 1.0 + tb * tb;
    const auto g = evolve_free_gaussian(fp, t, fig1_wavefunction_grid(fp));
    const auto table = wigner_transform(g, fp.mass, fp.hbar, x, v);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double n = std::norm(free_gaussian(fp, t, x[i]));
      if (n < 1e-3 * std::norm(free_gaussian(fp, t, 0.0))) continue;
      const std::span<const double> row(table.f.data() + i * v.size(), v.size());
      const auto m = compute_moments(row, grid, {fp.mass, 1e-10});
      const double u = vs * xbar[i] * tb / s2;
      const double p = fp.mass * n * vs * vs / (2.0 * s2);
      en = std::max(en, rel(m.n, n));
      eu = std::max(eu, std::abs(m.u[0] - u) / vs);
      ep = std::max(ep, rel(m.p, p));
      ++used;
    }
  }
  return {en < 1e-6 && eu < 1e-6 && ep < 1e-6,
          fmt("%zu columns, 256 velocity nodes on [-8, 8]: n %.2e, u %.2e, p %.2e", used, en, eu,
              ep)};
}

// Conservation: fluid mass over 1e4 steps; traveling continuity by construction.
Outcome ac9() {
  const auto P = nondim(0.0, 0.0);
  Fluid1DConfig cfg;
  cfg.N = 256;
  cfg.L = 2.0 * M_PI / 0.5;
  const Fluid1DSolver solver(P, cfg);
  const auto s = perturbed_state(solver, {P.n0, 0.0, 0.0, 0.0}, {1, 1e-2, true, {}});
  const double dt = 0.5 * solver.max_stable_dt(s);
  RunOptions opts;
  opts.dt = dt;
  opts.t_end = 1e4 * dt;
  opts.probe_every = 100;
  const auto res = run(solver, s, opts);
  const double m0 = res.probes.mass.front();
  double drift = 0.0;
  for (double m : res.probes.mass) drift = std::max(drift, rel(m, m0));

  const auto c = nondim_wave_frame(1.0);
  const auto t = integrate(fig23_initial_state(c), c, 100.0, {1e-9, 1e-12, 0.01});
  double flux = 0.0;
  const double ref = c.params.n0 * c.u0;
  for (const auto& smp : t.samples) flux = std::max(flux, rel(smp.n * (smp.state.u - c.v), ref));
  const double eps = std::numeric_limits<double>::epsilon();
  return {res.steps >= 10000 && drift < 1e-10 && flux <= 2.0 * eps,
          fmt("%zu steps: mass drift %.2e; max |n(u-v) - n0 u0|/n0u0 over %zu samples %.1e",
              res.steps, drift, t.samples.size(), flux)};
}

}  // namespace

int main() {
  const std::pair<const char*, Outcome (*)()> criteria[] = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5},
      {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}};
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s (%.1fs) %s\n", o.pass ? "PASS" : "FAIL", name, secs, o.detail.c_str());
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
