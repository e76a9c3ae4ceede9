#include "qfh/wigner_free.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <fftw3.h>

#include "qfh/error.hpp"
#include "qfh/spectral.hpp"

namespace qfh {

namespace {

using cplx = std::complex<double>;

// Evaluates ψ at arbitrary x inside the grid: either the exact formula or
// band-limited upsampling followed by 8-point Lagrange interpolation.
class Sampler {
 public:
  Sampler(const WavefunctionGrid& g, const WignerOptions& opts) : g_(g) {
    if (opts.use_exact && g.exact) {
      exact_ = true;
      return;
    }
    if (opts.upsample < 1) throw InvalidArgument("upsampling factor must be >= 1");
    factor_ = opts.upsample;
    fine_ = fourier_upsample(g.psi, factor_);
    h_ = g.dx / static_cast<double>(factor_);
    last_ = (g.size() - 1) * factor_;
  }

  cplx operator()(double x) const {
    if (x < g_.x0 || x > g_.x_last()) return 0.0;
    if (exact_) return g_.exact(x);
    const double q = (x - g_.x0) / h_;
    const auto fl = static_cast<long>(std::floor(q));
    const long start = std::clamp(fl - 3, 0L, static_cast<long>(last_) - 7);
    const double t = q - static_cast<double>(start);
    cplx sum = 0.0;
    for (int k = 0; k < 8; ++k) {
      double w = 1.0;
      for (int i = 0; i < 8; ++i)
        if (i != k) w *= (t - i) / static_cast<double>(k - i);
      sum += w * fine_[static_cast<std::size_t>(start + k)];
    }
    return sum;
  }

 private:
  const WavefunctionGrid& g_;
  bool exact_ = false;
  std::size_t factor_ = 1;
  std::vector<cplx> fine_;
  double h_ = 1.0;
  std::size_t last_ = 0;
};

// g_j = ψ*(x + s_j/2) ψ(x − s_j/2) for s_j = jΔx, j = 0..J.
std::vector<cplx> correlation(const WavefunctionGrid& g, const Sampler& S, double x) {
  std::vector<cplx> out;
  if (x < g.x0 || x > g.x_last()) return out;
  const double reach = std::min(x - g.x0, g.x_last() - x);
  const auto J = static_cast<std::size_t>(std::floor(2.0 * reach / g.dx + 1e-9));
  out.resize(J + 1);
  for (std::size_t j = 0; j <= J; ++j) {
    const double half = 0.5 * g.dx * static_cast<double>(j);
    out[j] = std::conj(S(x + half)) * S(x - half);
  }
  return out;
}

double transform_at(std::span<const cplx> g, double kappa, double ds) {
  if (g.empty()) return 0.0;
  double sum = g[0].real();
  const cplx rot = std::polar(1.0, kappa * ds);
  cplx phase = 1.0;
  for (std::size_t j = 1; j < g.size(); ++j) {
    phase *= rot;
    sum += 2.0 * (phase * g[j]).real();
  }
  return sum;
}

void check_normalized(const WavefunctionGrid& g) {
  if (g.size() < 16) throw InvalidArgument("wave function grid needs at least 16 points");
  if (!(g.dx > 0.0)) throw InvalidArgument("wave function grid spacing must be positive");
  const double norm = g.norm();
  if (!(std::abs(norm - 1.0) <= 1e-8))
    throw InvalidArgument("wave function is not normalized (sum |psi|^2 dx = " +
                          std::to_string(norm) + ")");
  double mean = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) mean += g.x(i) * std::norm(g.psi[i]) * g.dx;
  if (std::abs(mean - 0.5 * (g.x0 + g.x_last())) > g.dx)
    throw InvalidArgument("wave function grid is not centered on the packet");
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

void check_momentum_support(const WavefunctionGrid& g, double mass, double hbar, double v_lo,
                            double v_hi, double threshold) {
  const std::size_t n = g.size();
  std::unique_ptr<fftw_complex[], FftwDeleter> buf(
      static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
  if (!buf) throw std::bad_alloc();
  fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), buf.get(), buf.get(), FFTW_FORWARD,
                                    FFTW_ESTIMATE);
  for (std::size_t i = 0; i < n; ++i) {
    buf[i][0] = g.psi[i].real();
    buf[i][1] = g.psi[i].imag();
  }
  fftw_execute(plan);
  fftw_destroy_plan(plan);

  std::vector<double> density(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    density[i] = buf[i][0] * buf[i][0] + buf[i][1] * buf[i][1];
    peak = std::max(peak, density[i]);
  }
  const auto half = static_cast<long>(n / 2);
  for (std::size_t i = 0; i < n; ++i) {
    if (density[i] <= threshold * peak) continue;
    const long m = static_cast<long>(i) <= half ? static_cast<long>(i)
                                                 : static_cast<long>(i) - static_cast<long>(n);
    if (std::abs(m) >= half - 1)
      throw NumericalError("aliasing: momentum density reaches the wave function grid Nyquist limit");
    const double v = hbar * 2.0 * M_PI * static_cast<double>(m) /
                     (static_cast<double>(n) * g.dx * mass);
    if (v < v_lo || v > v_hi)
      throw NumericalError("aliasing: packet momentum support extends to v = " +
                           std::to_string(v) + ", outside the velocity grid");
  }
}

}  // namespace

double analytic_wigner(const RescaledPhasePoint& p) {
  const double a = p.x_bar - p.v_bar * p.t_bar;
  return std::exp(-a * a - p.v_bar * p.v_bar);
}

void FreeParticle::validate() const {
  if (!(mass > 0.0) || !(hbar > 0.0) || !(sigma > 0.0) || !std::isfinite(mass) ||
      !std::isfinite(hbar) || !std::isfinite(sigma))
    throw InvalidArgument("mass, hbar and sigma must be finite and positive");
}

double FreeParticle::f_scale() const { return M_PI * hbar / mass; }

std::vector<double> GridSpec::nodes() const {
  if (count < 2 || !(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
    throw InvalidArgument("grid needs hi > lo and at least 2 nodes");
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  out.back() = hi;
  return out;
}

double WavefunctionGrid::norm() const {
  double s = 0.0;
  for (const auto& c : psi) s += std::norm(c);
  return s * dx;
}

cplx free_gaussian(const FreeParticle& fp, double t, double x) {
  const cplx width = 1.0 + cplx(0.0, fp.t_bar(t));
  const double xb = x / fp.sigma;
  return std::pow(std::sqrt(M_PI) * fp.sigma, -0.5) / std::sqrt(width) *
         std::exp(-xb * xb / (2.0 * width));
}

WavefunctionGrid evolve_free_gaussian(const FreeParticle& fp, double t, const GridSpec& spec) {
  fp.validate();
  if (!(t >= 0.0) || !std::isfinite(t)) throw InvalidArgument("time must be finite and >= 0");
  const auto nodes = spec.nodes();
  WavefunctionGrid g;
  g.x0 = spec.lo;
  g.dx = spec.step();
  g.psi.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) g.psi[i] = free_gaussian(fp, t, nodes[i]);
  const double peak = std::abs(free_gaussian(fp, t, 0.0));
  const double edge = std::max(std::abs(g.psi.front()), std::abs(g.psi.back()));
  if (!(edge < 1e-10 * peak))
    throw InvalidArgument("position grid too narrow for t_bar = " + std::to_string(fp.t_bar(t)) +
                          ": edge amplitude is " + std::to_string(edge / peak) + " of the peak");
  g.exact = [fp, t](double x) { return free_gaussian(fp, t, x); };
  return g;
}

WignerTable wigner_transform(const WavefunctionGrid& psi, double mass, double hbar,
                             std::span<const double> x_nodes, std::span<const double> v_nodes,
                             const WignerOptions& opts) {
  if (!(mass > 0.0) || !(hbar > 0.0)) throw InvalidArgument("mass and hbar must be positive");
  if (x_nodes.empty() || v_nodes.empty()) throw InvalidArgument("empty phase-space grid");
  check_normalized(psi);
  const auto [vmin, vmax] = std::minmax_element(v_nodes.begin(), v_nodes.end());
  check_momentum_support(psi, mass, hbar, *vmin, *vmax, opts.aliasing_threshold);

  const Sampler S(psi, opts);
  const double pref = mass / (2.0 * M_PI * hbar) * psi.dx;
  WignerTable out{{x_nodes.begin(), x_nodes.end()}, {v_nodes.begin(), v_nodes.end()}, {}};
  out.f.resize(x_nodes.size() * v_nodes.size());
  for (std::size_t ix = 0; ix < x_nodes.size(); ++ix) {
    const auto g = correlation(psi, S, x_nodes[ix]);
    for (std::size_t iv = 0; iv < v_nodes.size(); ++iv)
      out.f[ix * v_nodes.size() + iv] = pref * transform_at(g, mass * v_nodes[iv] / hbar, psi.dx);
  }
  return out;
}

std::vector<double> wigner_at(const WavefunctionGrid& psi, double mass, double hbar,
                              std::span<const double> x, std::span<const double> v,
                              const WignerOptions& opts) {
  if (x.size() != v.size()) throw InvalidArgument("x and v lists differ in length");
  if (!(mass > 0.0) || !(hbar > 0.0)) throw InvalidArgument("mass and hbar must be positive");
  check_normalized(psi);
  const Sampler S(psi, opts);
  const double pref = mass / (2.0 * M_PI * hbar) * psi.dx;
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    out[i] = pref * transform_at(correlation(psi, S, x[i]), mass * v[i] / hbar, psi.dx);
  return out;
}

PhaseGrid fig1_phase_grid(const FreeParticle& fp) {
  fp.validate();
  const double vs = fp.velocity_scale();
  return {{-12.0 * fp.sigma, 12.0 * fp.sigma, 256}, {-4.0 * vs, 4.0 * vs, 256}};
}

GridSpec fig1_wavefunction_grid(const FreeParticle& fp) {
  fp.validate();
  return {-60.0 * fp.sigma, 60.0 * fp.sigma, 1201};
}

WignerTable rescale(const WignerTable& t, const FreeParticle& fp) {
  fp.validate();
  WignerTable out = t;
  for (auto& x : out.x) x /= fp.sigma;
  for (auto& v : out.v) v /= fp.velocity_scale();
  for (auto& f : out.f) f *= fp.f_scale();
  return out;
}

}  // namespace qfh
