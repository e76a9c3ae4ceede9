#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "qfh/error.hpp"
#include "qfh/params.hpp"
#include "qfh/spectral.hpp"

namespace qfh {

// Periodic 1D fluid–Poisson solver for the third-order moment hierarchy
// with the fourth moment dropped:
//
//   ∂t n = −∂x(n u)
//   ∂t u = −u ∂x u − ∂x p/(m n) + (e/m) ∂x φ
//   ∂t p = −u ∂x p − 3 p ∂x u − ∂x Q
//   ∂t Q = −u ∂x Q + 3 p ∂x p/(m n) − e ħ² n ∂x³φ/(4 m²) − 4 Q ∂x u
//   ∂x² φ = (e/ε0)(n − n0)
//
// ∂x³φ is taken as (e/ε0) ∂x n. The linearization of this system has, besides
// the Langmuir branch, a purely growing branch at every k (see
// eq14_growing_branch_omega_sq). Harmonics seeded by round-off or by the
// nonlinearity therefore grow; the `band` filter limits the retained modes.

enum class SpectralFilter {
  two_thirds,  // keep |m| <= N/3
  band,        // keep |m| <= band_max_mode
};

enum class DerivativeScheme {
  spectral,
  fd6,  // sixth-order central differences (Poisson stays spectral)
};

struct Fluid1DConfig {
  std::size_t N = 256;
  double L = 2.0 * M_PI;
  SpectralFilter filter = SpectralFilter::two_thirds;
  std::size_t band_max_mode = 1;
  DerivativeScheme derivative = DerivativeScheme::spectral;
  double cfl = 0.4;
  /// Halt when the density changes by more than this fraction of the local
  /// density between neighbouring cells.
  double steepening_threshold = 0.5;
  /// Allowed |mean(n) − n0| / n0 before Poisson is declared inconsistent.
  double poisson_tolerance = 1e-9;
};

/// Uniform reference state. Fields are stored as background + deviation so
/// that round-off scales with the perturbation, not with n0.
struct Background {
  double n = 1.0;
  double u = 0.0;
  double p = 0.0;
  double Q = 0.0;
};

struct FluidState1D {
  double L = 2.0 * M_PI;
  double t = 0.0;
  Background bg;
  std::vector<double> dn, du, dp, dQ;

  FluidState1D() = default;
  FluidState1D(std::size_t N, double L, Background bg);

  std::size_t size() const { return dn.size(); }
  double dx() const { return L / static_cast<double>(size()); }
  double x(std::size_t i) const { return dx() * static_cast<double>(i); }

  double n(std::size_t i) const { return bg.n + dn[i]; }
  double u(std::size_t i) const { return bg.u + du[i]; }
  double p(std::size_t i) const { return bg.p + dp[i]; }
  double Q(std::size_t i) const { return bg.Q + dQ[i]; }

  std::vector<double> n_field() const;
  std::vector<double> u_field() const;
  std::vector<double> p_field() const;
  std::vector<double> Q_field() const;

  /// ∫ n dx, with the background and deviation parts summed separately.
  double total_mass() const;
  /// ∫ m n u dx.
  double total_momentum(double mass) const;
};

/// Time derivatives of the four transported fields.
struct FieldSet {
  std::vector<double> n, u, p, Q;
};

class CflError : public NumericalError {
 public:
  CflError(const std::string& what, double suggested_dt)
      : NumericalError(what), suggested_dt_(suggested_dt) {}
  double suggested_dt() const { return suggested_dt_; }

 private:
  double suggested_dt_;
};

class Fluid1DSolver {
 public:
  Fluid1DSolver(const PlasmaParams& params, const Fluid1DConfig& config);

  const PlasmaParams& params() const { return params_; }
  const Fluid1DConfig& config() const { return config_; }
  /// Highest Fourier mode the filter keeps.
  std::size_t retained_modes() const { return keep_; }
  double wavenumber(std::size_t mode) const { return spectral_.wavenumber(mode); }

  /// Uniform state on this grid; bg.n must equal n0 for Poisson solvability.
  FluidState1D uniform_state(const Background& bg) const;

  /// Eulerian time derivatives. Throws NumericalError when n <= 0 somewhere,
  /// a field is non-finite, or mean(n) departs from n0.
  FieldSet rhs(const FluidState1D& state) const;

  /// Zero-mean φ from a full density field.
  std::vector<double> solve_poisson(std::span<const double> n) const;
  std::vector<double> potential(const FluidState1D& state) const;

  /// Largest dt allowed by the advective/acoustic CFL limit and by the
  /// Langmuir frequency at the grid Nyquist wavenumber.
  double max_stable_dt(const FluidState1D& state) const;

  /// One classical RK4 step. Throws CflError if dt exceeds max_stable_dt,
  /// NumericalError on positivity loss or wave steepening.
  FluidState1D step(const FluidState1D& state, double dt) const;

  /// Applies the configured spectral filter to the deviation fields.
  void filter(FluidState1D& state) const;

 private:
  void check_state(const FluidState1D& state) const;
  void ddx(std::span<const double> f, std::span<double> out) const;

  PlasmaParams params_;
  Fluid1DConfig config_;
  PeriodicSpectral spectral_;
  std::size_t keep_;
};

/// Langmuir-branch eigenvector of the linearized 1D system about
/// (n0, 0, p0, 0) for δn = cos(kx − ωt): the other fields are
/// amplitude · cos(kx − ωt).
struct LinearMode {
  double k = 0.0;
  double omega = 0.0;
  double n = 1.0, u = 0.0, p = 0.0, Q = 0.0;
};
LinearMode langmuir_mode(double k, const PlasmaParams& params, double p0);

/// Linear growth rate of the purely growing branch at k.
double growing_branch_rate(double k, const PlasmaParams& params, double p0);

struct ModePerturbation {
  int mode = 1;
  /// Density amplitude relative to n0.
  double amplitude = 1e-6;
  /// Load the Langmuir eigenvector. Otherwise the selected fields get
  /// amplitude·scale·cos(kx) with scales n0, ωp/k, m n0 (ωp/k)², m n0 (ωp/k)³.
  bool eigenmode = true;
  std::array<bool, 4> fields{true, false, false, false};
};

FluidState1D perturbed_state(const Fluid1DSolver& solver, const Background& bg,
                             const ModePerturbation& perturbation);

/// (2/N) Σ f_j cos(2π m j / N).
double mode_cosine_coefficient(std::span<const double> f, int mode);

struct RunOptions {
  double t_end = 1.0;
  /// 0 selects the stability limit of the initial state.
  double dt = 0.0;
  std::size_t probe_every = 1;
  int probe_mode = 1;
};

struct ProbeSeries {
  std::vector<double> t;
  std::vector<double> n_mode;   // cosine coefficient of δn at probe_mode
  std::vector<double> n_point;  // n at x = 0
  std::vector<double> u_point;  // u at x = 0
  std::vector<double> mass;
};

struct RunResult {
  FluidState1D final_state;
  ProbeSeries probes;
  std::size_t steps = 0;
  double dt = 0.0;
};

/// Fixed-step integration to t_end (the step is shrunk so the last step
/// lands exactly on t_end). `on_probe` fires at each probe sample.
RunResult run(const Fluid1DSolver& solver, FluidState1D state, const RunOptions& opts,
              const std::function<void(const FluidState1D&)>& on_probe = {});

/// Dominant angular frequency of a uniformly sampled probe series.
/// Upward zero crossings (linear refinement) when at least three exist,
/// else the spectral peak with parabolic interpolation. Throws
/// NumericalError when the series does not oscillate.
double measure_frequency(std::span<const double> samples, double dt);

}  // namespace qfh
