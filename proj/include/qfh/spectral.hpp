#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace qfh {

/// Fourier operations on a uniform periodic grid of `n` points over [0, L).
///
/// Wraps FFTW plans and aligned scratch buffers. Methods are const but use
/// the scratch buffers, so one instance must not be shared between threads.
class PeriodicSpectral {
 public:
  PeriodicSpectral(std::size_t n, double length);
  ~PeriodicSpectral();
  PeriodicSpectral(PeriodicSpectral&&) noexcept;
  PeriodicSpectral& operator=(PeriodicSpectral&&) noexcept;
  PeriodicSpectral(const PeriodicSpectral&) = delete;
  PeriodicSpectral& operator=(const PeriodicSpectral&) = delete;

  std::size_t size() const;
  double length() const;
  /// Angular wavenumber 2π·mode/L.
  double wavenumber(std::size_t mode) const;
  /// Highest resolvable mode below Nyquist.
  std::size_t max_mode() const;

  /// Unnormalized real-to-complex transform; `out` gets n/2 + 1 entries.
  void forward(std::span<const double> in, std::vector<std::complex<double>>& out) const;
  /// Inverse of `forward` including the 1/n normalization.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out) const;

  /// d^order f / dx^order keeping modes |m| <= keep_modes. The Nyquist
  /// mode is always dropped.
  void derivative(std::span<const double> f, int order, std::size_t keep_modes,
                  std::span<double> out) const;

  /// Zeroes modes |m| > keep_modes (and Nyquist) in place.
  void low_pass(std::span<double> f, std::size_t keep_modes) const;

  /// Solves d²φ/dx² = rhs for zero-mean rhs, returning the zero-mean φ.
  /// The mean of rhs is ignored; callers check solvability.
  void inverse_laplacian(std::span<const double> rhs, std::size_t keep_modes,
                         std::span<double> out) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Band-limited upsampling of a periodic complex sequence by an integer
/// factor (zero-padding in Fourier space).
std::vector<std::complex<double>> fourier_upsample(std::span<const std::complex<double>> in,
                                                   std::size_t factor);

/// Magnitude spectrum |DFT| of a real series (n/2 + 1 bins).
std::vector<double> amplitude_spectrum(std::span<const double> in);

}  // namespace qfh
