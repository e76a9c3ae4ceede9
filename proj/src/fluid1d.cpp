#include "qfh/fluid1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "qfh/dispersion.hpp"

namespace qfh {

FluidState1D::FluidState1D(std::size_t N, double L_, Background bg_)
    : L(L_), bg(bg_), dn(N, 0.0), du(N, 0.0), dp(N, 0.0), dQ(N, 0.0) {}

namespace {

std::vector<double> with_background(double base, const std::vector<double>& dev) {
  std::vector<double> out(dev.size());
  for (std::size_t i = 0; i < dev.size(); ++i) out[i] = base + dev[i];
  return out;
}

FluidState1D axpy(const FluidState1D& s, double a, const FieldSet& d) {
  FluidState1D out = s;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.dn[i] += a * d.n[i];
    out.du[i] += a * d.u[i];
    out.dp[i] += a * d.p[i];
    out.dQ[i] += a * d.Q[i];
  }
  return out;
}

void fd6_derivative(std::span<const double> f, double h, std::span<double> out) {
  const auto n = static_cast<long>(f.size());
  auto at = [&](long i) { return f[static_cast<std::size_t>(((i % n) + n) % n)]; };
  for (long i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i)] =
        (-at(i - 3) + 9.0 * at(i - 2) - 45.0 * at(i - 1) + 45.0 * at(i + 1) -
         9.0 * at(i + 2) + at(i + 3)) /
        (60.0 * h);
  }
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

std::vector<double> FluidState1D::n_field() const { return with_background(bg.n, dn); }
std::vector<double> FluidState1D::u_field() const { return with_background(bg.u, du); }
std::vector<double> FluidState1D::p_field() const { return with_background(bg.p, dp); }
std::vector<double> FluidState1D::Q_field() const { return with_background(bg.Q, dQ); }

double FluidState1D::total_mass() const {
  double dev = 0.0;
  for (double v : dn) dev += v;
  return (bg.n * static_cast<double>(size()) + dev) * dx();
}

double FluidState1D::total_momentum(double mass) const {
  double s = 0.0;
  for (std::size_t i = 0; i < size(); ++i) s += n(i) * u(i);
  return mass * s * dx();
}

Fluid1DSolver::Fluid1DSolver(const PlasmaParams& params, const Fluid1DConfig& config)
    : params_(params), config_(config), spectral_(config.N, config.L) {
  params_.validate();
  if (config_.N < 8) throw InvalidArgument("fluid grid needs at least 8 points");
  if (!(config_.cfl > 0.0)) throw InvalidArgument("CFL safety factor must be positive");
  if (!(config_.steepening_threshold > 0.0))
    throw InvalidArgument("steepening threshold must be positive");
  if (config_.filter == SpectralFilter::two_thirds) {
    keep_ = config_.N / 3;
  } else {
    if (config_.band_max_mode < 1 || config_.band_max_mode > spectral_.max_mode())
      throw InvalidArgument("band filter must keep between 1 and N/2 - 1 modes");
    keep_ = config_.band_max_mode;
  }
}

FluidState1D Fluid1DSolver::uniform_state(const Background& bg) const {
  if (std::abs(bg.n - params_.n0) > config_.poisson_tolerance * params_.n0)
    throw InvalidArgument("background density must equal n0 on a periodic domain");
  if (!(bg.p >= 0.0)) throw InvalidArgument("background pressure must be non-negative");
  return FluidState1D(config_.N, config_.L, bg);
}

void Fluid1DSolver::check_state(const FluidState1D& s) const {
  if (s.size() != config_.N || s.L != config_.L)
    throw InvalidArgument("state grid does not match the solver grid");
  double mean_dev = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double n = s.n(i);
    if (!std::isfinite(n) || !std::isfinite(s.u(i)) || !std::isfinite(s.p(i)) ||
        !std::isfinite(s.Q(i)))
      throw NumericalError("non-finite field value at x = " + format_double(s.x(i)) +
                           ", t = " + format_double(s.t));
    if (!(n > 0.0))
      throw NumericalError("density vanished (vacuum breakdown) at x = " +
                           format_double(s.x(i)) + ", t = " + format_double(s.t));
    mean_dev += s.dn[i];
  }
  mean_dev /= static_cast<double>(s.size());
  const double tol = config_.poisson_tolerance * params_.n0;
  if (std::abs(s.bg.n - params_.n0) > tol || std::abs(mean_dev) > tol)
    throw NumericalError("mean density differs from n0; periodic Poisson problem is inconsistent");
}

void Fluid1DSolver::ddx(std::span<const double> f, std::span<double> out) const {
  if (config_.derivative == DerivativeScheme::spectral)
    spectral_.derivative(f, 1, keep_, out);
  else
    fd6_derivative(f, config_.L / static_cast<double>(config_.N), out);
}

std::vector<double> Fluid1DSolver::solve_poisson(std::span<const double> n) const {
  if (n.size() != config_.N) throw InvalidArgument("density length does not match the grid");
  double mean = 0.0;
  for (double v : n) mean += v;
  mean /= static_cast<double>(n.size());
  if (std::abs(mean - params_.n0) > config_.poisson_tolerance * params_.n0)
    throw NumericalError("mean density differs from n0; periodic Poisson problem is inconsistent");
  std::vector<double> rhs(n.size()), phi(n.size());
  const double c = params_.e / params_.eps0;
  for (std::size_t i = 0; i < n.size(); ++i) rhs[i] = c * (n[i] - params_.n0);
  spectral_.inverse_laplacian(rhs, spectral_.max_mode(), phi);
  return phi;
}

std::vector<double> Fluid1DSolver::potential(const FluidState1D& state) const {
  check_state(state);
  std::vector<double> rhs(state.size()), phi(state.size());
  const double c = params_.e / params_.eps0;
  for (std::size_t i = 0; i < state.size(); ++i) rhs[i] = c * state.dn[i];
  spectral_.inverse_laplacian(rhs, keep_, phi);
  return phi;
}

FieldSet Fluid1DSolver::rhs(const FluidState1D& s) const {
  check_state(s);
  const std::size_t N = s.size();
  const auto& P = params_;
  const auto& bg = s.bg;

  std::vector<double> flux(N), dflux(N), Dn(N), Du(N), Dp(N), DQ(N), Ex(N), scratch(N);
  for (std::size_t i = 0; i < N; ++i)
    flux[i] = bg.n * s.du[i] + bg.u * s.dn[i] + s.dn[i] * s.du[i];
  ddx(flux, dflux);
  ddx(s.dn, Dn);
  ddx(s.du, Du);
  ddx(s.dp, Dp);
  ddx(s.dQ, DQ);

  // ∂x φ from Poisson, spectrally.
  const double c = P.e / P.eps0;
  for (std::size_t i = 0; i < N; ++i) scratch[i] = c * s.dn[i];
  spectral_.inverse_laplacian(scratch, keep_, Ex);
  spectral_.derivative(std::vector<double>(Ex), 1, keep_, Ex);

  const double quantum = P.e * P.hbar * P.hbar / (4.0 * P.m * P.m) * c;
  FieldSet out{std::vector<double>(N), std::vector<double>(N), std::vector<double>(N),
               std::vector<double>(N)};
  for (std::size_t i = 0; i < N; ++i) {
    const double n = s.n(i), u = s.u(i), p = s.p(i), Q = s.Q(i);
    out.n[i] = -dflux[i];
    out.u[i] = -u * Du[i] - Dp[i] / (P.m * n) + P.e / P.m * Ex[i];
    out.p[i] = -u * Dp[i] - 3.0 * p * Du[i] - DQ[i];
    out.Q[i] = -u * DQ[i] + 3.0 * p * Dp[i] / (P.m * n) - quantum * n * Dn[i] - 4.0 * Q * Du[i];
  }
  spectral_.low_pass(out.n, keep_);
  spectral_.low_pass(out.u, keep_);
  spectral_.low_pass(out.p, keep_);
  spectral_.low_pass(out.Q, keep_);
  return out;
}

double Fluid1DSolver::max_stable_dt(const FluidState1D& s) const {
  double speed = 0.0, T_eff = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double n = s.n(i);
    const double p = std::max(0.0, s.p(i));
    speed = std::max(speed, std::abs(s.u(i)) + std::sqrt(3.0 * p / (params_.m * n)));
    T_eff = std::max(T_eff, p / (n * params_.kB));
  }
  double dt = std::numeric_limits<double>::infinity();
  if (speed > 0.0) dt = config_.cfl * s.dx() / speed;
  PlasmaParams eff = params_;
  eff.T0_par = T_eff;
  const double k_nyquist = M_PI * static_cast<double>(config_.N) / config_.L;
  const double omega_max = std::sqrt(eq14_omega_sq(k_nyquist, eff));
  return std::min(dt, config_.cfl / omega_max);
}

void Fluid1DSolver::filter(FluidState1D& s) const {
  spectral_.low_pass(s.dn, keep_);
  spectral_.low_pass(s.du, keep_);
  spectral_.low_pass(s.dp, keep_);
  spectral_.low_pass(s.dQ, keep_);
}

FluidState1D Fluid1DSolver::step(const FluidState1D& s, double dt) const {
  const double limit = max_stable_dt(s);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12))
    throw CflError("time step " + format_double(dt) + " violates the stability limit; use dt <= " +
                       format_double(limit),
                   limit);
  const FieldSet k1 = rhs(s);
  const FieldSet k2 = rhs(axpy(s, 0.5 * dt, k1));
  const FieldSet k3 = rhs(axpy(s, 0.5 * dt, k2));
  const FieldSet k4 = rhs(axpy(s, dt, k3));
  FluidState1D out = s;
  const double w = dt / 6.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    out.dn[i] += w * (k1.n[i] + 2.0 * k2.n[i] + 2.0 * k3.n[i] + k4.n[i]);
    out.du[i] += w * (k1.u[i] + 2.0 * k2.u[i] + 2.0 * k3.u[i] + k4.u[i]);
    out.dp[i] += w * (k1.p[i] + 2.0 * k2.p[i] + 2.0 * k3.p[i] + k4.p[i]);
    out.dQ[i] += w * (k1.Q[i] + 2.0 * k2.Q[i] + 2.0 * k3.Q[i] + k4.Q[i]);
  }
  out.t = s.t + dt;
  check_state(out);

  const std::size_t N = out.size();
  double jump = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double a = out.n(i), b = out.n((i + 1) % N);
    jump = std::max(jump, std::abs(b - a) / std::min(a, b));
  }
  if (jump > config_.steepening_threshold)
    throw NumericalError("wave steepening: relative density jump " + format_double(jump) +
                         " per cell exceeds " + format_double(config_.steepening_threshold) +
                         " at t = " + format_double(out.t));
  return out;
}

LinearMode langmuir_mode(double k, const PlasmaParams& params, double p0) {
  if (!(k > 0.0)) throw InvalidArgument("linear mode needs k > 0");
  if (!(p0 >= 0.0)) throw InvalidArgument("equilibrium pressure must be non-negative");
  PlasmaParams eff = params;
  eff.T0_par = p0 / (params.n0 * params.kB);
  const double w2 = eq14_omega_sq(k, eff);
  LinearMode mode;
  mode.k = k;
  mode.omega = std::sqrt(w2);
  mode.n = 1.0;
  mode.u = mode.omega / (k * params.n0);
  mode.p = params.m / (k * k) * eq14_excess(k, eff);
  mode.Q = (mode.omega * mode.p - 3.0 * p0 * k * mode.u) / k;
  return mode;
}

double growing_branch_rate(double k, const PlasmaParams& params, double p0) {
  PlasmaParams eff = params;
  eff.T0_par = p0 / (params.n0 * params.kB);
  return std::sqrt(eq14_excess(k, eff));
}

FluidState1D perturbed_state(const Fluid1DSolver& solver, const Background& bg,
                             const ModePerturbation& pert) {
  FluidState1D s = solver.uniform_state(bg);
  if (pert.mode < 1 || static_cast<std::size_t>(pert.mode) > solver.retained_modes())
    throw InvalidArgument("perturbation mode is outside the retained spectral band");
  const auto& P = solver.params();
  const double k = solver.wavenumber(static_cast<std::size_t>(pert.mode));
  std::array<double, 4> amp{};
  if (pert.eigenmode) {
    if (bg.Q != 0.0) throw InvalidArgument("eigenmode initialization needs zero background heat flux");
    const auto mode = langmuir_mode(k, P, bg.p);
    const double a = pert.amplitude * P.n0;
    amp = {a * mode.n, a * mode.u, a * mode.p, a * mode.Q};
  } else {
    const double v = P.omega_p() / k;
    const std::array<double, 4> scale{P.n0, v, P.m * P.n0 * v * v, P.m * P.n0 * v * v * v};
    for (std::size_t f = 0; f < 4; ++f)
      amp[f] = pert.fields[f] ? pert.amplitude * scale[f] : 0.0;
  }
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double c = std::cos(k * s.x(i));
    s.dn[i] = amp[0] * c;
    s.du[i] = amp[1] * c;
    s.dp[i] = amp[2] * c;
    s.dQ[i] = amp[3] * c;
  }
  solver.filter(s);
  return s;
}

double mode_cosine_coefficient(std::span<const double> f, int mode) {
  const auto N = static_cast<double>(f.size());
  double s = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j)
    s += f[j] * std::cos(2.0 * M_PI * mode * static_cast<double>(j) / N);
  return 2.0 * s / N;
}

RunResult run(const Fluid1DSolver& solver, FluidState1D state, const RunOptions& opts,
              const std::function<void(const FluidState1D&)>& on_probe) {
  if (!(opts.t_end > 0.0)) throw InvalidArgument("run needs t_end > 0");
  if (opts.probe_every < 1) throw InvalidArgument("probe cadence must be >= 1");
  RunResult res;
  const double dt0 = opts.dt > 0.0 ? opts.dt : solver.max_stable_dt(state);
  const auto steps = static_cast<std::size_t>(std::ceil(opts.t_end / dt0 - 1e-9));
  res.dt = opts.t_end / static_cast<double>(std::max<std::size_t>(steps, 1));
  const double t0 = state.t;

  auto probe = [&](const FluidState1D& s) {
    res.probes.t.push_back(s.t);
    res.probes.n_mode.push_back(mode_cosine_coefficient(s.dn, opts.probe_mode));
    res.probes.n_point.push_back(s.n(0));
    res.probes.u_point.push_back(s.u(0));
    res.probes.mass.push_back(s.total_mass());
    if (on_probe) on_probe(s);
  };

  probe(state);
  for (std::size_t i = 1; i <= steps; ++i) {
    state = solver.step(state, res.dt);
    state.t = t0 + res.dt * static_cast<double>(i);
    if (i % opts.probe_every == 0 || i == steps) probe(state);
  }
  res.steps = steps;
  res.final_state = std::move(state);
  return res;
}

double measure_frequency(std::span<const double> samples, double dt) {
  if (!(dt > 0.0)) throw InvalidArgument("sampling interval must be positive");
  const std::size_t n = samples.size();
  if (n < 4) throw NumericalError("probe series too short to measure a frequency");
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = samples[i] - mean;

  std::vector<double> up;
  std::size_t sign_changes = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if ((s[i] < 0.0) != (s[i + 1] < 0.0)) ++sign_changes;
    if (s[i] < 0.0 && s[i + 1] >= 0.0)
      up.push_back(dt * (static_cast<double>(i) + s[i] / (s[i] - s[i + 1])));
  }
  if (up.size() >= 3)
    return 2.0 * M_PI * static_cast<double>(up.size() - 1) / (up.back() - up.front());
  if (sign_changes < 2) throw NumericalError("no oscillation detected in probe series");

  const auto spec = amplitude_spectrum(s);
  std::size_t peak = 1;
  for (std::size_t m = 1; m < spec.size(); ++m)
    if (spec[m] > spec[peak]) peak = m;
  double offset = 0.0;
  if (peak + 1 < spec.size()) {
    const double a = spec[peak - 1], b = spec[peak], c = spec[peak + 1];
    const double denom = a - 2.0 * b + c;
    if (denom != 0.0) offset = 0.5 * (a - c) / denom;
  }
  return 2.0 * M_PI * (static_cast<double>(peak) + offset) / (static_cast<double>(n) * dt);
}

}  // namespace qfh
