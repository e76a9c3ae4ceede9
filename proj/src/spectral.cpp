#include "qfh/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <fftw3.h>

#include "qfh/error.hpp"

namespace qfh {

namespace {

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> alloc(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (!p) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const { fftw_destroy_plan(p); }
};
using Plan = std::unique_ptr<fftw_plan_s, PlanDeleter>;

}  // namespace

struct PeriodicSpectral::Impl {
  std::size_t n;
  double length;
  FftwBuffer<double> real;
  FftwBuffer<fftw_complex> spec;
  Plan r2c;
  Plan c2r;

  Impl(std::size_t n_, double length_)
      : n(n_),
        length(length_),
        real(alloc<double>(n_)),
        spec(alloc<fftw_complex>(n_ / 2 + 1)) {
    const int ni = static_cast<int>(n);
    r2c.reset(fftw_plan_dft_r2c_1d(ni, real.get(), spec.get(), FFTW_ESTIMATE));
    c2r.reset(fftw_plan_dft_c2r_1d(ni, spec.get(), real.get(), FFTW_ESTIMATE));
    if (!r2c || !c2r) throw NumericalError("FFTW plan creation failed");
  }

  void load(std::span<const double> in) {
    if (in.size() != n) throw InvalidArgument("field length does not match the grid");
    std::copy(in.begin(), in.end(), real.get());
    fftw_execute(r2c.get());
  }

  void store(std::span<double> out) {
    if (out.size() != n) throw InvalidArgument("field length does not match the grid");
    fftw_execute(c2r.get());  // destroys spec
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = real[i] * scale;
  }

  // Zero modes above keep and the Nyquist bin of even grids.
  void truncate(std::size_t keep) {
    const std::size_t bins = n / 2 + 1;
    for (std::size_t m = 0; m < bins; ++m) {
      const bool nyquist = (n % 2 == 0) && m == n / 2;
      if (m > keep || nyquist) spec[m][0] = spec[m][1] = 0.0;
    }
  }
};

PeriodicSpectral::PeriodicSpectral(std::size_t n, double length) {
  if (n < 4) throw InvalidArgument("periodic grid needs at least 4 points");
  if (!(length > 0.0) || !std::isfinite(length))
    throw InvalidArgument("periodic domain length must be finite and positive");
  impl_ = std::make_unique<Impl>(n, length);
}

PeriodicSpectral::~PeriodicSpectral() = default;
PeriodicSpectral::PeriodicSpectral(PeriodicSpectral&&) noexcept = default;
PeriodicSpectral& PeriodicSpectral::operator=(PeriodicSpectral&&) noexcept = default;

std::size_t PeriodicSpectral::size() const { return impl_->n; }
double PeriodicSpectral::length() const { return impl_->length; }

double PeriodicSpectral::wavenumber(std::size_t mode) const {
  return 2.0 * M_PI * static_cast<double>(mode) / impl_->length;
}

std::size_t PeriodicSpectral::max_mode() const { return (impl_->n - 1) / 2; }

void PeriodicSpectral::forward(std::span<const double> in,
                               std::vector<std::complex<double>>& out) const {
  impl_->load(in);
  const std::size_t bins = impl_->n / 2 + 1;
  out.resize(bins);
  for (std::size_t m = 0; m < bins; ++m) out[m] = {impl_->spec[m][0], impl_->spec[m][1]};
}

void PeriodicSpectral::inverse(std::span<const std::complex<double>> in,
                               std::span<double> out) const {
  const std::size_t bins = impl_->n / 2 + 1;
  if (in.size() != bins) throw InvalidArgument("spectrum length does not match the grid");
  for (std::size_t m = 0; m < bins; ++m) {
    impl_->spec[m][0] = in[m].real();
    impl_->spec[m][1] = in[m].imag();
  }
  impl_->store(out);
}

void PeriodicSpectral::derivative(std::span<const double> f, int order,
                                  std::size_t keep_modes, std::span<double> out) const {
  if (order < 0) throw InvalidArgument("derivative order must be non-negative");
  impl_->load(f);
  impl_->truncate(keep_modes);
  const std::size_t bins = impl_->n / 2 + 1;
  for (std::size_t m = 0; m < bins; ++m) {
    // (i k)^order
    const std::complex<double> ik{0.0, wavenumber(m)};
    std::complex<double> factor = 1.0;
    for (int o = 0; o < order; ++o) factor *= ik;
    const std::complex<double> c{impl_->spec[m][0], impl_->spec[m][1]};
    const auto r = c * factor;
    impl_->spec[m][0] = r.real();
    impl_->spec[m][1] = r.imag();
  }
  impl_->store(out);
}

void PeriodicSpectral::low_pass(std::span<double> f, std::size_t keep_modes) const {
  impl_->load(f);
  impl_->truncate(keep_modes);
  impl_->store(f);
}

void PeriodicSpectral::inverse_laplacian(std::span<const double> rhs, std::size_t keep_modes,
                                         std::span<double> out) const {
  impl_->load(rhs);
  impl_->truncate(keep_modes);
  impl_->spec[0][0] = impl_->spec[0][1] = 0.0;
  const std::size_t bins = impl_->n / 2 + 1;
  for (std::size_t m = 1; m < bins; ++m) {
    const double k = wavenumber(m);
    impl_->spec[m][0] /= -k * k;
    impl_->spec[m][1] /= -k * k;
  }
  impl_->store(out);
}

std::vector<std::complex<double>> fourier_upsample(std::span<const std::complex<double>> in,
                                                   std::size_t factor) {
  const std::size_t n = in.size();
  if (n < 2 || factor < 1) throw InvalidArgument("upsampling needs >= 2 samples and factor >= 1");
  if (factor == 1) return {in.begin(), in.end()};
  const std::size_t big = n * factor;
  auto a = alloc<fftw_complex>(n);
  auto b = alloc<fftw_complex>(big);
  Plan fwd(fftw_plan_dft_1d(static_cast<int>(n), a.get(), a.get(), FFTW_FORWARD, FFTW_ESTIMATE));
  Plan bwd(fftw_plan_dft_1d(static_cast<int>(big), b.get(), b.get(), FFTW_BACKWARD, FFTW_ESTIMATE));
  for (std::size_t i = 0; i < n; ++i) {
    a[i][0] = in[i].real();
    a[i][1] = in[i].imag();
  }
  fftw_execute(fwd.get());
  std::memset(b.get(), 0, sizeof(fftw_complex) * big);
  const std::size_t half = n / 2;
  for (std::size_t m = 0; m < n; ++m) {
    std::size_t dst;
    double w = 1.0;
    const bool nyquist = n % 2 == 0 && m == half;
    if (m < half || (n % 2 == 1 && m == half)) dst = m;
    else if (!nyquist) dst = big - (n - m);
    else {
      // Even-length Nyquist bin is split between ±n/2.
      w = 0.5;
      b[big - half][0] += w * a[m][0];
      b[big - half][1] += w * a[m][1];
      dst = half;
    }
    b[dst][0] += w * a[m][0];
    b[dst][1] += w * a[m][1];
  }
  fftw_execute(bwd.get());
  std::vector<std::complex<double>> out(big);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < big; ++i) out[i] = {b[i][0] * scale, b[i][1] * scale};
  return out;
}

std::vector<double> amplitude_spectrum(std::span<const double> in) {
  const std::size_t n = in.size();
  if (n < 2) throw InvalidArgument("spectrum needs at least 2 samples");
  auto r = alloc<double>(n);
  auto c = alloc<fftw_complex>(n / 2 + 1);
  Plan plan(fftw_plan_dft_r2c_1d(static_cast<int>(n), r.get(), c.get(), FFTW_ESTIMATE));
  std::copy(in.begin(), in.end(), r.get());
  fftw_execute(plan.get());
  std::vector<double> out(n / 2 + 1);
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = std::hypot(c[m][0], c[m][1]);
  return out;
}

}  // namespace qfh
