#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace qfh {

// Free-particle Gaussian packet ψ(x, 0) = (√π σ)^{-1/2} exp(−x²/(2σ²)) and
// its Wigner function. Rescaled variables:
//   x̄ = x/σ,  v̄ = m v σ/ħ,  t̄ = ħ t/(m σ²),  f̄ = (π ħ/m) f.

struct RescaledPhasePoint {
  double x_bar = 0.0;
  double v_bar = 0.0;
  double t_bar = 0.0;
};

/// exp(−(x̄ − v̄ t̄)² − v̄²).
double analytic_wigner(const RescaledPhasePoint& point);

struct FreeParticle {
  double mass = 1.0;
  double hbar = 1.0;
  double sigma = 1.0;

  void validate() const;
  double t_bar(double t) const { return hbar * t / (mass * sigma * sigma); }
  double time(double t_bar) const { return t_bar * mass * sigma * sigma / hbar; }
  double velocity_scale() const { return hbar / (mass * sigma); }
  /// πħ/m, the factor between f and f̄.
  double f_scale() const;
};

/// Inclusive uniform node set lo, ..., hi.
struct GridSpec {
  double lo = 0.0;
  double hi = 1.0;
  std::size_t count = 2;

  std::vector<double> nodes() const;
  double step() const { return (hi - lo) / static_cast<double>(count - 1); }
};

struct WavefunctionGrid {
  double x0 = 0.0;
  double dx = 1.0;
  std::vector<std::complex<double>> psi;
  /// Exact ψ(x) when known; the transform then samples it directly.
  std::function<std::complex<double>(double)> exact;

  std::size_t size() const { return psi.size(); }
  double x(std::size_t i) const { return x0 + dx * static_cast<double>(i); }
  double x_last() const { return x(size() - 1); }
  /// Σ |ψ|² Δx.
  double norm() const;
};

/// Exact free evolution, complex width σ² + iħt/m.
std::complex<double> free_gaussian(const FreeParticle& fp, double t, double x);

/// Samples the evolved packet. Throws InvalidArgument for t < 0 or when
/// |ψ| at either grid end exceeds 1e-10 of the peak.
WavefunctionGrid evolve_free_gaussian(const FreeParticle& fp, double t, const GridSpec& grid);

struct WignerOptions {
  /// Use WavefunctionGrid::exact for the half-shifted samples if present.
  bool use_exact = true;
  /// Fourier upsampling factor before local interpolation (generic path).
  std::size_t upsample = 4;
  /// Momentum density above this fraction of its peak must lie inside
  /// the velocity grid.
  double aliasing_threshold = 1e-6;
};

/// Raw f(x, v) on a tensor grid, row-major with v fastest.
struct WignerTable {
  std::vector<double> x;
  std::vector<double> v;
  std::vector<double> f;

  double operator()(std::size_t ix, std::size_t iv) const { return f[ix * v.size() + iv]; }
};

/// f(x, v) = (m/2πħ) ∫ ds e^{imvs/ħ} ψ*(x + s/2) ψ(x − s/2), as a trapezoid
/// sum over s = jΔx restricted to x ± s/2 inside the ψ grid. Throws
/// InvalidArgument if ψ is not normalized to 1e-8 or not centered on the
/// grid, NumericalError when the packet's momentum support is aliased or
/// lies outside the velocity grid.
WignerTable wigner_transform(const WavefunctionGrid& psi, double mass, double hbar,
                             std::span<const double> x_nodes, std::span<const double> v_nodes,
                             const WignerOptions& opts = {});

/// Pointwise transform at arbitrary (x, v) pairs (no aliasing check).
std::vector<double> wigner_at(const WavefunctionGrid& psi, double mass, double hbar,
                              std::span<const double> x, std::span<const double> v,
                              const WignerOptions& opts = {});

/// Defaults: x̄ ∈ [−12, 12], v̄ ∈ [−4, 4], 256 × 256; ψ on x̄ ∈ [−60, 60] with Δx̄ = 0.1.
struct PhaseGrid {
  GridSpec x;
  GridSpec v;
};
PhaseGrid fig1_phase_grid(const FreeParticle& fp);
GridSpec fig1_wavefunction_grid(const FreeParticle& fp);
inline constexpr double fig1_times[] = {0.0, 2.0, 4.0, 6.0};

/// (x̄, v̄, f̄) view of a raw table.
WignerTable rescale(const WignerTable& table, const FreeParticle& fp);

}  // namespace qfh
