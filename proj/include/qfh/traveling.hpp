#pragma once

#include <array>
#include <complex>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "qfh/error.hpp"
#include "qfh/params.hpp"

namespace qfh {

// Traveling-wave reduction in the frame ξ = x − v t. The density is not
// integrated: n = n0 u0 / (u − v) holds identically.

struct TravelingState {
  double xi = 0.0;
  double u = 0.0;
  double p = 0.0;
  double Q = 0.0;
  double phi = 0.0;
  double psi = 0.0;  // dφ/dξ
};

struct WaveFrameConfig {
  double v = 0.0;
  double u0 = 1.0;
  PlasmaParams params;
  /// Minimum |u − v| / |u0| before the frame-relative velocity counts as zero.
  double sonic_epsilon = 1e-8;

  /// ħ ωp / (m u0²).
  double H() const { return quantum_parameter(params, u0); }
  /// Throws InvalidArgument for u0 == 0 or bad parameters.
  void validate() const;
};

/// Nondimensional test frame: v = 0, u0 = 1, nondim preset with ħ = H.
WaveFrameConfig nondim_wave_frame(double H);

/// Raised where the frame-relative velocity vanishes or the derivative
/// system becomes singular.
class SonicSingularity : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

struct TravelingDerivatives {
  double u = 0.0, p = 0.0, Q = 0.0, phi = 0.0, psi = 0.0;
};

/// n = n0 u0 / (u − v). Throws SonicSingularity when |u − v| <= ε|u0|,
/// NumericalError when the derived density is not positive.
double density(const TravelingState& s, const WaveFrameConfig& cfg);

/// d/dξ of (u, p, Q, φ, ψ). Solves the 3×3 system for (u', p', Q'); throws
/// SonicSingularity when |det| < 1e-12 ‖A‖_F³ in nondimensional form.
TravelingDerivatives traveling_rhs(const TravelingState& s, const WaveFrameConfig& cfg);

/// Equilibrium u = u0 + v, p = p0, Q = φ = ψ = 0.
TravelingState equilibrium_state(const WaveFrameConfig& cfg, double p0);

/// n(0) = 2n0/3 (u − v = 3u0/2), p(0) = m n0 u0², Q = φ = ψ = 0.
TravelingState fig23_initial_state(const WaveFrameConfig& cfg);

struct IntegrateOptions {
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  /// Spacing of output samples in ξ; 0 gives 1000 intervals.
  double sample_step = 0.0;
  std::size_t max_steps = 10'000'000;
};

struct TrajectorySample {
  TravelingState state;
  double n = 0.0;
};

enum class HaltReason { completed, sonic_singularity };

struct Trajectory {
  std::vector<TrajectorySample> samples;
  HaltReason halt = HaltReason::completed;
  std::string message;
  std::size_t steps = 0;
};

/// Adaptive Dormand–Prince 5(4) integration from initial.xi to xi_end
/// (which may lie below initial.xi). Samples come from the dense output.
/// A singularity ends the run with a partial trajectory, including a step
/// collapse where |det A| / ‖A‖_F³ < 1e-6. Step-size underflow elsewhere or
/// too many steps throws NumericalError.
Trajectory integrate(const TravelingState& initial, const WaveFrameConfig& cfg, double xi_end,
                     const IntegrateOptions& opts = {});

struct EquilibriumSpectrum {
  /// Eigenvalues of the 5×5 Jacobian in nondimensional units (per u0/ωp).
  std::array<std::complex<double>, 5> eigenvalues;
  double max_real = 0.0;
  bool center_like = false;
};

inline constexpr double center_threshold = 1e-8;

/// Central-difference Jacobian of traveling_rhs at equilibrium_state(cfg, p0).
EquilibriumSpectrum equilibrium_eigenvalues(const WaveFrameConfig& cfg, double p0);

/// Bisection in H on the center-like classification of the equilibrium
/// spectrum. p0_bar is the equilibrium pressure in units of m n0 u0².
/// A singular Jacobian counts as not center-like. Throws InvalidArgument
/// when the bracket ends classify the same way.
double stability_threshold(const std::function<WaveFrameConfig(double)>& family, double p0_bar,
                           double H_lo, double H_hi, double tol = 1e-7);

std::string_view to_string(HaltReason r);

}  // namespace qfh
