#include "qfh/traveling.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

namespace qfh {

namespace {

using Vec5 = std::array<double, 5>;  // (u − v)/u0, p̄, Q̄, φ̄, ψ̄

constexpr double near_singular = 1e-6;

// Signed reference scales: velocity u0, pressure m n0 u0², heat flux
// m n0 u0³, potential m u0²/e, length u0/ωp.
struct Scales {
  double v, U, P, Qs, Phi, Xi, n0, H, eps;

  explicit Scales(const WaveFrameConfig& cfg) {
    cfg.validate();
    const auto& p = cfg.params;
    v = cfg.v;
    U = cfg.u0;
    P = p.m * p.n0 * U * U;
    Qs = P * U;
    Phi = p.m * U * U / p.e;
    Xi = U / p.omega_p();
    n0 = p.n0;
    H = cfg.H();
    eps = cfg.sonic_epsilon;
  }

  Vec5 to_nondim(const TravelingState& s) const {
    return {(s.u - v) / U, s.p / P, s.Q / Qs, s.phi / Phi, s.psi * Xi / Phi};
  }

  TravelingState to_physical(const Vec5& x, double xi_bar) const {
    return {xi_bar * Xi, v + U * x[0], P * x[1], Qs * x[2], Phi * x[3], Phi * x[4] / Xi};
  }
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(8);
  os << v;
  return os.str();
}

double nondim_density(double w, double eps) {
  if (!(std::abs(w) > eps))
    throw SonicSingularity("frame-relative velocity u - v vanished (|u - v|/|u0| = " +
                           fmt(std::abs(w)) + ")");
  const double n = 1.0 / w;
  if (!(n > 0.0))
    throw NumericalError("derived density n0 u0/(u - v) is not positive");
  return n;
}

Eigen::Matrix3d system_matrix(const Vec5& x, double H, double n) {
  const double w = x[0], p = x[1], Q = x[2];
  Eigen::Matrix3d A;
  A << w, 1.0 / n, 0.0,
       3.0 * p, w, 1.0,
       4.0 * Q - H * H * n * n / (4.0 * w), -3.0 * p / n, w;
  return A;
}

// |det A| / ‖A‖_F³, zero when the density itself is undefined.
double conditioning(const Vec5& x, double H, double eps) {
  if (!(std::abs(x[0]) > eps) || !(x[0] > 0.0)) return 0.0;
  const Eigen::Matrix3d A = system_matrix(x, H, 1.0 / x[0]);
  const double norm = A.norm();
  return std::abs(A.determinant()) / (norm * norm * norm);
}

Vec5 nondim_rhs(const Vec5& x, double H, double eps) {
  const double psi = x[4];
  const double n = nondim_density(x[0], eps);
  const Eigen::Matrix3d A = system_matrix(x, H, n);
  const double norm = A.norm();
  const double det = A.determinant();
  if (!(std::abs(det) >= 1e-12 * norm * norm * norm))
    throw SonicSingularity("sonic singularity: derivative system is singular (det = " +
                           fmt(det) + ")");
  const Eigen::Vector3d d = A.partialPivLu().solve(Eigen::Vector3d(psi, 0.0, 0.0));
  return {d[0], d[1], d[2], psi, n - 1.0};
}

}  // namespace

void WaveFrameConfig::validate() const {
  params.validate();
  if (u0 == 0.0 || !std::isfinite(u0))
    throw InvalidArgument("reference velocity u0 must be finite and nonzero");
  if (!std::isfinite(v)) throw InvalidArgument("frame speed v must be finite");
  if (!(sonic_epsilon >= 0.0)) throw InvalidArgument("sonic epsilon must be non-negative");
}

WaveFrameConfig nondim_wave_frame(double H) {
  WaveFrameConfig cfg;
  cfg.params = with_quantum_parameter(nondimensional_preset(), 1.0, H);
  return cfg;
}

double density(const TravelingState& s, const WaveFrameConfig& cfg) {
  const Scales sc(cfg);
  return sc.n0 * nondim_density((s.u - sc.v) / sc.U, sc.eps);
}

TravelingDerivatives traveling_rhs(const TravelingState& s, const WaveFrameConfig& cfg) {
  const Scales sc(cfg);
  const Vec5 d = nondim_rhs(sc.to_nondim(s), sc.H, sc.eps);
  const double k = 1.0 / sc.Xi;
  return {sc.U * d[0] * k, sc.P * d[1] * k, sc.Qs * d[2] * k, s.psi,
          cfg.params.e / cfg.params.eps0 * sc.n0 * d[4]};
}

TravelingState equilibrium_state(const WaveFrameConfig& cfg, double p0) {
  cfg.validate();
  return {0.0, cfg.u0 + cfg.v, p0, 0.0, 0.0, 0.0};
}

TravelingState fig23_initial_state(const WaveFrameConfig& cfg) {
  cfg.validate();
  const auto& p = cfg.params;
  return {0.0, cfg.v + 1.5 * cfg.u0, p.m * p.n0 * cfg.u0 * cfg.u0, 0.0, 0.0, 0.0};
}

Trajectory integrate(const TravelingState& initial, const WaveFrameConfig& cfg, double xi_end,
                     const IntegrateOptions& opts) {
  namespace ode = boost::numeric::odeint;
  const Scales sc(cfg);
  if (!(opts.rel_tol > 0.0) || !(opts.abs_tol > 0.0))
    throw InvalidArgument("integrator tolerances must be positive");
  if (!std::isfinite(xi_end) || xi_end == initial.xi)
    throw InvalidArgument("integration interval must be finite and non-empty");
  if (opts.sample_step < 0.0) throw InvalidArgument("sample step must be non-negative");

  Vec5 x = sc.to_nondim(initial);
  nondim_rhs(x, sc.H, sc.eps);  // rejects singular initial data up front

  const double span = xi_end - initial.xi;
  const double step = opts.sample_step > 0.0 ? opts.sample_step : std::abs(span) / 1000.0;
  const auto intervals = static_cast<std::size_t>(std::ceil(std::abs(span) / step - 1e-9));
  std::vector<double> targets(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i)
    targets[i] = (initial.xi + std::copysign(step * static_cast<double>(i), span)) / sc.Xi;
  targets.back() = xi_end / sc.Xi;

  const double t0 = initial.xi / sc.Xi;
  const double dir = targets.back() > t0 ? 1.0 : -1.0;

  Trajectory traj;
  auto record = [&](const Vec5& y, double t) {
    traj.samples.push_back({sc.to_physical(y, t), sc.n0 / y[0]});
  };
  record(x, t0);

  auto system = [&](const Vec5& y, Vec5& dydt, double) { dydt = nondim_rhs(y, sc.H, sc.eps); };
  auto stepper = ode::make_dense_output(opts.abs_tol, opts.rel_tol, ode::runge_kutta_dopri5<Vec5>());
  stepper.initialize(x, t0, dir * 1e-3);

  std::size_t next = 1;
  try {
    while (next < targets.size()) {
      if (traj.steps++ >= opts.max_steps)
        throw NumericalError("traveling-wave integration exceeded " +
                             std::to_string(opts.max_steps) + " steps");
      const auto [ta, tb] = stepper.do_step(system);
      if (std::abs(tb - ta) < 1e-14 * std::max(1.0, std::abs(tb))) {
        // Derivatives diverge on the approach to a singular system, so the
        // step collapses before the determinant test itself trips.
        if (conditioning(stepper.current_state(), sc.H, sc.eps) < near_singular)
          throw SonicSingularity("sonic singularity: derivative system is nearly singular at xi = " +
                                 fmt(tb * sc.Xi));
        throw NumericalError("step size underflow at xi = " + fmt(tb * sc.Xi));
      }
      while (next < targets.size() && dir * (targets[next] - tb) <= 0.0) {
        Vec5 y;
        stepper.calc_state(targets[next], y);
        record(y, targets[next]);
        ++next;
      }
    }
  } catch (const SonicSingularity& e) {
    traj.halt = HaltReason::sonic_singularity;
    traj.message = std::string(e.what()) + " after xi = " +
                   fmt(traj.samples.back().state.xi);
  } catch (const ode::odeint_error& e) {
    throw NumericalError(std::string("traveling-wave integrator failed: ") + e.what());
  }
  return traj;
}

EquilibriumSpectrum equilibrium_eigenvalues(const WaveFrameConfig& cfg, double p0) {
  const Scales sc(cfg);
  const Vec5 x0 = sc.to_nondim(equilibrium_state(cfg, p0));
  Eigen::Matrix<double, 5, 5> J;
  for (int i = 0; i < 5; ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(x0[static_cast<std::size_t>(i)]));
    Vec5 xp = x0, xm = x0;
    xp[static_cast<std::size_t>(i)] += h;
    xm[static_cast<std::size_t>(i)] -= h;
    const Vec5 fp = nondim_rhs(xp, sc.H, sc.eps);
    const Vec5 fm = nondim_rhs(xm, sc.H, sc.eps);
    for (int r = 0; r < 5; ++r)
      J(r, i) = (fp[static_cast<std::size_t>(r)] - fm[static_cast<std::size_t>(r)]) / (2.0 * h);
  }
  Eigen::EigenSolver<Eigen::Matrix<double, 5, 5>> solver(J, false);
  if (solver.info() != Eigen::Success)
    throw NumericalError("eigenvalue iteration did not converge");
  EquilibriumSpectrum out;
  out.max_real = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < 5; ++i) {
    out.eigenvalues[static_cast<std::size_t>(i)] = solver.eigenvalues()[i];
    out.max_real = std::max(out.max_real, solver.eigenvalues()[i].real());
  }
  out.center_like = out.max_real < center_threshold;
  return out;
}

double stability_threshold(const std::function<WaveFrameConfig(double)>& family, double p0_bar,
                           double H_lo, double H_hi, double tol) {
  if (!(H_lo < H_hi) || !(H_lo >= 0.0)) throw InvalidArgument("need 0 <= H_lo < H_hi");
  if (!(tol > 0.0)) throw InvalidArgument("bisection tolerance must be positive");
  auto center = [&](double H) {
    const WaveFrameConfig cfg = family(H);
    const auto& p = cfg.params;
    try {
      return equilibrium_eigenvalues(cfg, p0_bar * p.m * p.n0 * cfg.u0 * cfg.u0).center_like;
    } catch (const SonicSingularity&) {
      return false;
    }
  };
  double lo = H_lo, hi = H_hi;
  const bool c_lo = center(lo);
  if (c_lo == center(hi))
    throw InvalidArgument(std::string("no change of stability in bracket [") + fmt(H_lo) + ", " +
                          fmt(H_hi) + "]: both ends are " + (c_lo ? "stable" : "unstable"));
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (center(mid) == c_lo ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

std::string_view to_string(HaltReason r) {
  switch (r) {
    case HaltReason::completed: return "completed";
    case HaltReason::sonic_singularity: return "sonic_singularity";
  }
  return "unknown";
}

}  // namespace qfh
