#include "qfh/qfh.h"

#include <cstring>
#include <new>
#include <optional>
#include <string>

#include "qfh/dispersion.hpp"
#include "qfh/error.hpp"
#include "qfh/fluid1d.hpp"
#include "qfh/linear_response.hpp"
#include "qfh/moments.hpp"
#include "qfh/params.hpp"
#include "qfh/traveling.hpp"
#include "qfh/wigner_free.hpp"

struct qfh_params {
  qfh::PlasmaParams p;
};

struct qfh_moments {
  qfh::MomentSet set;
  std::vector<std::pair<std::string, double>> rows;
};

struct qfh_fluid {
  qfh::Fluid1DSolver solver;
  std::optional<qfh::FluidState1D> state;
};

struct qfh_trajectory {
  qfh::Trajectory t;
};

namespace {

thread_local std::string last_error;

qfh_status status_of(qfh::ErrorKind kind) {
  switch (kind) {
    case qfh::ErrorKind::invalid_argument: return QFH_ERR_INVALID_ARGUMENT;
    case qfh::ErrorKind::config: return QFH_ERR_CONFIG;
    case qfh::ErrorKind::numerical: return QFH_ERR_NUMERICAL;
    case qfh::ErrorKind::io: return QFH_ERR_IO;
  }
  return QFH_ERR_INTERNAL;
}

template <class F>
qfh_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return QFH_OK;
  } catch (const qfh::Error& e) {
    last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
  } catch (const std::exception& e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown error";
  }
  return QFH_ERR_INTERNAL;
}

template <class... P>
void require(P*... ptrs) {
  if (((ptrs == nullptr) || ...)) throw qfh::InvalidArgument("null pointer argument");
}

qfh::Relation to_relation(qfh_relation r) {
  if (r < QFH_REL_EQ14 || r > QFH_REL_TEMPERATURE_CLOSURE)
    throw qfh::InvalidArgument("unknown relation code");
  return qfh::all_relations[r];
}

Eigen::Matrix3d to_matrix(const double* a) {
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = a[3 * i + j];
  return m;
}

void from_matrix(const Eigen::Matrix3d& m, double* a) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a[3 * i + j] = m(i, j);
}

qfh::WaveFrameConfig to_frame(const qfh_params* params, const qfh_wave_frame* frame) {
  require(params, frame);
  qfh::WaveFrameConfig cfg;
  cfg.v = frame->v;
  cfg.u0 = frame->u0;
  cfg.sonic_epsilon = frame->sonic_epsilon;
  cfg.params = params->p;
  cfg.validate();
  return cfg;
}

qfh::TravelingState to_state(const qfh_tw_state& s) {
  return {s.xi, s.u, s.p, s.Q, s.phi, s.psi};
}

qfh_tw_state from_state(const qfh::TravelingState& s) {
  return {s.xi, s.u, s.p, s.Q, s.phi, s.psi};
}

qfh::FluidState1D& fluid_state(qfh_fluid* f) {
  if (!f->state) throw qfh::InvalidArgument("fluid state not initialized");
  return *f->state;
}

const qfh::FluidState1D& fluid_state(const qfh_fluid* f) {
  if (!f->state) throw qfh::InvalidArgument("fluid state not initialized");
  return *f->state;
}

void finish_moments(qfh_moments& m) { m.rows = qfh::moment_components(m.set); }

}  // namespace

extern "C" {

const char* qfh_version(void) { return "0.1.0"; }
const char* qfh_last_error(void) { return last_error.c_str(); }

const char* qfh_status_name(qfh_status status) {
  switch (status) {
    case QFH_OK: return "ok";
    case QFH_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case QFH_ERR_CONFIG: return "config";
    case QFH_ERR_NUMERICAL: return "numerical";
    case QFH_ERR_IO: return "io";
    case QFH_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

qfh_status qfh_params_create(const char* preset, qfh_params** out) {
  return guarded([&] {
    require(out);
    *out = nullptr;
    *out = new qfh_params{preset ? qfh::preset(preset) : qfh::nondimensional_preset()};
  });
}

qfh_status qfh_params_clone(const qfh_params* params, qfh_params** out) {
  return guarded([&] {
    require(params, out);
    *out = new qfh_params{params->p};
  });
}

void qfh_params_destroy(qfh_params* params) { delete params; }

qfh_status qfh_params_load_file(qfh_params* params, const char* path) {
  return guarded([&] {
    require(params, path);
    params->p = qfh::load_params_file(path, params->p);
  });
}

qfh_status qfh_params_set(qfh_params* params, const char* key, double value) {
  return guarded([&] {
    require(params, key);
    qfh::set_param(params->p, key, value);
  });
}

qfh_status qfh_params_get(const qfh_params* params, const char* key, double* value) {
  return guarded([&] {
    require(params, key, value);
    *value = qfh::get_param(params->p, key);
  });
}

size_t qfh_params_key_count(void) { return qfh::param_keys().size(); }

const char* qfh_params_key(size_t index) {
  const auto& keys = qfh::param_keys();
  return index < keys.size() ? keys[index].c_str() : nullptr;
}

qfh_status qfh_params_validate(const qfh_params* params) {
  return guarded([&] {
    require(params);
    params->p.validate();
  });
}

qfh_status qfh_params_omega_p(const qfh_params* params, double* out) {
  return guarded([&] {
    require(params, out);
    params->p.validate();
    *out = params->p.omega_p();
  });
}

qfh_status qfh_quantum_parameter(const qfh_params* params, double u0, double* out) {
  return guarded([&] {
    require(params, out);
    *out = qfh::quantum_parameter(params->p, u0);
  });
}

qfh_status qfh_params_set_quantum_parameter(qfh_params* params, double u0, double H) {
  return guarded([&] {
    require(params);
    params->p = qfh::with_quantum_parameter(params->p, u0, H);
  });
}

qfh_status qfh_relation_from_string(const char* tag, qfh_relation* out) {
  return guarded([&] {
    require(tag, out);
    *out = static_cast<qfh_relation>(qfh::relation_from_string(tag));
  });
}

const char* qfh_relation_name(qfh_relation relation) {
  if (relation < QFH_REL_EQ14 || relation > QFH_REL_TEMPERATURE_CLOSURE) return nullptr;
  return qfh::to_string(qfh::all_relations[relation]).data();
}

qfh_status qfh_omega_sq(const qfh_params* params, qfh_relation relation, double k, double gamma,
                        double* out) {
  return guarded([&] {
    require(params, out);
    params->p.validate();
    *out = qfh::omega_sq(to_relation(relation), k, params->p, gamma);
  });
}

qfh_status qfh_eq14_excess(const qfh_params* params, double k, double* out) {
  return guarded([&] {
    require(params, out);
    params->p.validate();
    *out = qfh::eq14_excess(k, params->p);
  });
}

qfh_status qfh_eq14_growing_branch_omega_sq(const qfh_params* params, double k, double* out) {
  return guarded([&] {
    require(params, out);
    params->p.validate();
    *out = qfh::eq14_growing_branch_omega_sq(k, params->p);
  });
}

qfh_status qfh_dispersion_sweep(const qfh_params* params, qfh_relation relation, double k_min,
                                double k_max, size_t n, int log_spacing, double gamma,
                                double* k_out, double* omega_sq_out) {
  return guarded([&] {
    require(params, k_out, omega_sq_out);
    params->p.validate();
    const auto pts = qfh::sweep(to_relation(relation), k_min, k_max, static_cast<int>(n),
                                params->p, log_spacing ? qfh::Spacing::log : qfh::Spacing::uniform,
                                gamma);
    for (size_t i = 0; i < pts.size(); ++i) {
      k_out[i] = pts[i].k;
      omega_sq_out[i] = pts[i].omega_sq;
    }
  });
}

qfh_status qfh_anisotropic_dyad(const qfh_params* params, double n, double T_perp, double T_par,
                                double out[9]) {
  return guarded([&] {
    require(params, out);
    from_matrix(qfh::anisotropic_dyad(n, T_perp, T_par, params->p), out);
  });
}

qfh_status qfh_delta_p(const qfh_params* params, const double k_vec[3], double omega_sq,
                       double delta_phi, const double P0[9], double out[9]) {
  return guarded([&] {
    require(params, k_vec, P0, out);
    const Eigen::Vector3d k(k_vec[0], k_vec[1], k_vec[2]);
    from_matrix(qfh::delta_P_along(k, omega_sq, delta_phi, to_matrix(P0), params->p), out);
  });
}

qfh_status qfh_dispersion_residual(const qfh_params* params, double k, double omega_sq,
                                   double delta_phi, const double P0[9], double* out) {
  return guarded([&] {
    require(params, P0, out);
    *out = qfh::dispersion_residual({k, omega_sq, delta_phi, to_matrix(P0), params->p});
  });
}

qfh_status qfh_moments_from_csv(const char* path, double mass, double decay_threshold,
                                qfh_moments** out) {
  return guarded([&] {
    require(path, out);
    *out = nullptr;
    const auto dist = qfh::load_distribution_csv_file(path);
    auto m = std::make_unique<qfh_moments>();
    m->set = qfh::compute_moments(dist.f, dist.grid, {mass, decay_threshold});
    finish_moments(*m);
    *out = m.release();
  });
}

qfh_status qfh_moments_compute_1d(const double* v, const double* f, size_t n, double mass,
                                  double decay_threshold, qfh_moments** out) {
  return guarded([&] {
    require(v, f, out);
    *out = nullptr;
    const qfh::VelocityGrid grid({qfh::Axis::from_nodes(std::vector<double>(v, v + n))});
    auto m = std::make_unique<qfh_moments>();
    m->set = qfh::compute_moments(std::span<const double>(f, n), grid, {mass, decay_threshold});
    finish_moments(*m);
    *out = m.release();
  });
}

void qfh_moments_destroy(qfh_moments* moments) { delete moments; }

size_t qfh_moments_component_count(const qfh_moments* moments) {
  return moments ? moments->rows.size() : 0;
}

qfh_status qfh_moments_component(const qfh_moments* moments, size_t index, const char** name,
                                 double* value) {
  return guarded([&] {
    require(moments, name, value);
    if (index >= moments->rows.size()) throw qfh::InvalidArgument("component index out of range");
    *name = moments->rows[index].first.c_str();
    *value = moments->rows[index].second;
  });
}

int qfh_moments_boundary_violated(const qfh_moments* moments) {
  return moments && moments->set.boundary_decay_violated ? 1 : 0;
}

double qfh_moments_boundary_ratio(const qfh_moments* moments) {
  return moments ? moments->set.boundary_ratio : 0.0;
}

void qfh_fluid_config_default(qfh_fluid_config* c) {
  if (!c) return;
  const qfh::Fluid1DConfig d;
  *c = {d.N,   d.L,   QFH_FILTER_TWO_THIRDS, d.band_max_mode, QFH_DERIV_SPECTRAL,
        d.cfl, d.steepening_threshold, d.poisson_tolerance};
}

void qfh_perturbation_default(qfh_perturbation* p) {
  if (!p) return;
  const qfh::ModePerturbation d;
  *p = {d.mode, d.amplitude, d.eigenmode ? 1 : 0, {1, 0, 0, 0}};
}

qfh_status qfh_fluid_create(const qfh_params* params, const qfh_fluid_config* config,
                            qfh_fluid** out) {
  return guarded([&] {
    require(params, config, out);
    *out = nullptr;
    qfh::Fluid1DConfig c;
    c.N = config->N;
    c.L = config->L;
    c.filter = config->filter == QFH_FILTER_BAND ? qfh::SpectralFilter::band
                                                 : qfh::SpectralFilter::two_thirds;
    if (config->filter != QFH_FILTER_BAND && config->filter != QFH_FILTER_TWO_THIRDS)
      throw qfh::InvalidArgument("unknown filter code");
    c.band_max_mode = config->band_max_mode;
    if (config->derivative != QFH_DERIV_SPECTRAL && config->derivative != QFH_DERIV_FD6)
      throw qfh::InvalidArgument("unknown derivative scheme code");
    c.derivative = config->derivative == QFH_DERIV_FD6 ? qfh::DerivativeScheme::fd6
                                                       : qfh::DerivativeScheme::spectral;
    c.cfl = config->cfl;
    c.steepening_threshold = config->steepening_threshold;
    c.poisson_tolerance = config->poisson_tolerance;
    *out = new qfh_fluid{qfh::Fluid1DSolver(params->p, c), std::nullopt};
  });
}

void qfh_fluid_destroy(qfh_fluid* fluid) { delete fluid; }

qfh_status qfh_fluid_init(qfh_fluid* fluid, double u_bg, double p_bg, double Q_bg,
                          const qfh_perturbation* perturbation) {
  return guarded([&] {
    require(fluid);
    const qfh::Background bg{fluid->solver.params().n0, u_bg, p_bg, Q_bg};
    if (!perturbation) {
      fluid->state = fluid->solver.uniform_state(bg);
      return;
    }
    qfh::ModePerturbation mp;
    mp.mode = perturbation->mode;
    mp.amplitude = perturbation->amplitude;
    mp.eigenmode = perturbation->eigenmode != 0;
    for (size_t i = 0; i < 4; ++i) mp.fields[i] = perturbation->fields[i] != 0;
    fluid->state = qfh::perturbed_state(fluid->solver, bg, mp);
  });
}

qfh_status qfh_fluid_wavenumber(const qfh_fluid* fluid, int mode, double* out) {
  return guarded([&] {
    require(fluid, out);
    if (mode < 0) throw qfh::InvalidArgument("mode must be non-negative");
    *out = fluid->solver.wavenumber(static_cast<size_t>(mode));
  });
}

qfh_status qfh_fluid_max_stable_dt(const qfh_fluid* fluid, double* out) {
  return guarded([&] {
    require(fluid, out);
    *out = fluid->solver.max_stable_dt(fluid_state(fluid));
  });
}

qfh_status qfh_fluid_step(qfh_fluid* fluid, double dt) {
  return guarded([&] {
    require(fluid);
    fluid->state = fluid->solver.step(fluid_state(fluid), dt);
  });
}

qfh_status qfh_fluid_run(qfh_fluid* fluid, double t_end, double dt, size_t probe_every,
                         int probe_mode, qfh_probe_fn on_probe, void* user, size_t* steps,
                         double* dt_used) {
  return guarded([&] {
    require(fluid);
    qfh::RunOptions opts;
    opts.t_end = t_end;
    opts.dt = dt;
    opts.probe_every = probe_every;
    opts.probe_mode = probe_mode;
    std::function<void(const qfh::FluidState1D&)> cb;
    if (on_probe) {
      cb = [&](const qfh::FluidState1D& s) {
        const qfh_probe p{s.t, qfh::mode_cosine_coefficient(s.dn, probe_mode), s.n(0), s.u(0),
                          s.total_mass()};
        on_probe(&p, user);
      };
    }
    auto res = qfh::run(fluid->solver, fluid_state(fluid), opts, cb);
    fluid->state = std::move(res.final_state);
    if (steps) *steps = res.steps;
    if (dt_used) *dt_used = res.dt;
  });
}

qfh_status qfh_fluid_time(const qfh_fluid* fluid, double* out) {
  return guarded([&] {
    require(fluid, out);
    *out = fluid_state(fluid).t;
  });
}

size_t qfh_fluid_size(const qfh_fluid* fluid) { return fluid ? fluid->solver.config().N : 0; }

qfh_status qfh_fluid_fields(const qfh_fluid* fluid, double* x, double* n, double* u, double* p,
                            double* Q, double* phi) {
  return guarded([&] {
    require(fluid);
    const auto& s = fluid_state(fluid);
    std::vector<double> pot;
    if (phi) pot = fluid->solver.potential(s);
    for (size_t i = 0; i < s.size(); ++i) {
      if (x) x[i] = s.x(i);
      if (n) n[i] = s.n(i);
      if (u) u[i] = s.u(i);
      if (p) p[i] = s.p(i);
      if (Q) Q[i] = s.Q(i);
      if (phi) phi[i] = pot[i];
    }
  });
}

qfh_status qfh_fluid_total_mass(const qfh_fluid* fluid, double* out) {
  return guarded([&] {
    require(fluid, out);
    *out = fluid_state(fluid).total_mass();
  });
}

qfh_status qfh_measure_frequency(const double* samples, size_t n, double dt, double* out) {
  return guarded([&] {
    require(samples, out);
    *out = qfh::measure_frequency(std::span<const double>(samples, n), dt);
  });
}

void qfh_wave_frame_default(qfh_wave_frame* frame) {
  if (!frame) return;
  const qfh::WaveFrameConfig d;
  *frame = {d.v, d.u0, d.sonic_epsilon};
}

qfh_status qfh_tw_fig23_initial(const qfh_params* params, const qfh_wave_frame* frame,
                                qfh_tw_state* out) {
  return guarded([&] {
    require(out);
    *out = from_state(qfh::fig23_initial_state(to_frame(params, frame)));
  });
}

qfh_status qfh_tw_equilibrium(const qfh_params* params, const qfh_wave_frame* frame, double p0,
                              qfh_tw_state* out) {
  return guarded([&] {
    require(out);
    *out = from_state(qfh::equilibrium_state(to_frame(params, frame), p0));
  });
}

qfh_status qfh_tw_density(const qfh_params* params, const qfh_wave_frame* frame,
                          const qfh_tw_state* state, double* out) {
  return guarded([&] {
    require(state, out);
    *out = qfh::density(to_state(*state), to_frame(params, frame));
  });
}

qfh_status qfh_tw_rhs(const qfh_params* params, const qfh_wave_frame* frame,
                      const qfh_tw_state* state, double out[5]) {
  return guarded([&] {
    require(state, out);
    const auto d = qfh::traveling_rhs(to_state(*state), to_frame(params, frame));
    out[0] = d.u;
    out[1] = d.p;
    out[2] = d.Q;
    out[3] = d.phi;
    out[4] = d.psi;
  });
}

qfh_status qfh_tw_integrate(const qfh_params* params, const qfh_wave_frame* frame,
                            const qfh_tw_state* initial, double xi_end, double rel_tol,
                            double abs_tol, double sample_step, qfh_trajectory** out) {
  return guarded([&] {
    require(initial, out);
    *out = nullptr;
    qfh::IntegrateOptions opts;
    opts.rel_tol = rel_tol;
    opts.abs_tol = abs_tol;
    opts.sample_step = sample_step > 0.0 ? sample_step : 0.0;
    *out = new qfh_trajectory{
        qfh::integrate(to_state(*initial), to_frame(params, frame), xi_end, opts)};
  });
}

void qfh_trajectory_destroy(qfh_trajectory* trajectory) { delete trajectory; }

size_t qfh_trajectory_size(const qfh_trajectory* trajectory) {
  return trajectory ? trajectory->t.samples.size() : 0;
}

qfh_status qfh_trajectory_sample(const qfh_trajectory* trajectory, size_t index,
                                 qfh_tw_state* state, double* n) {
  return guarded([&] {
    require(trajectory);
    if (index >= trajectory->t.samples.size())
      throw qfh::InvalidArgument("sample index out of range");
    const auto& s = trajectory->t.samples[index];
    if (state) *state = from_state(s.state);
    if (n) *n = s.n;
  });
}

int qfh_trajectory_halted(const qfh_trajectory* trajectory) {
  return trajectory && trajectory->t.halt != qfh::HaltReason::completed ? 1 : 0;
}

const char* qfh_trajectory_message(const qfh_trajectory* trajectory) {
  return trajectory ? trajectory->t.message.c_str() : "";
}

qfh_status qfh_tw_eigenvalues(const qfh_params* params, const qfh_wave_frame* frame, double p0,
                              double re[5], double im[5], int* center_like) {
  return guarded([&] {
    require(re, im);
    const auto spec = qfh::equilibrium_eigenvalues(to_frame(params, frame), p0);
    for (size_t i = 0; i < 5; ++i) {
      re[i] = spec.eigenvalues[i].real();
      im[i] = spec.eigenvalues[i].imag();
    }
    if (center_like) *center_like = spec.center_like ? 1 : 0;
  });
}

qfh_status qfh_tw_threshold(const qfh_params* params, const qfh_wave_frame* frame, double p0_bar,
                            double H_lo, double H_hi, double tol, double* out) {
  return guarded([&] {
    require(out);
    const qfh::WaveFrameConfig base = to_frame(params, frame);
    auto family = [&](double H) {
      qfh::WaveFrameConfig cfg = base;
      cfg.params = qfh::with_quantum_parameter(base.params, base.u0, H);
      return cfg;
    };
    *out = qfh::stability_threshold(family, p0_bar, H_lo, H_hi, tol);
  });
}

void qfh_wigner_spec_default(qfh_wigner_spec* spec) {
  if (!spec) return;
  *spec = {1.0, 1.0, 1.0, -12.0, 12.0, 256, -4.0, 4.0, 256, 60.0, 0.1, 1, 4, 1e-6};
}

double qfh_wigner_analytic(double x_bar, double v_bar, double t_bar) {
  return qfh::analytic_wigner({x_bar, v_bar, t_bar});
}

namespace {

struct WignerSetup {
  qfh::FreeParticle fp;
  qfh::GridSpec xs, vs, psi;
};

WignerSetup wigner_setup(const qfh_wigner_spec* spec) {
  require(spec);
  WignerSetup s;
  s.fp = {spec->mass, spec->hbar, spec->sigma};
  s.fp.validate();
  const double vscale = s.fp.velocity_scale();
  s.xs = {spec->x_lo * s.fp.sigma, spec->x_hi * s.fp.sigma, spec->nx};
  s.vs = {spec->v_lo * vscale, spec->v_hi * vscale, spec->nv};
  if (!(spec->psi_half_width > 0.0) || !(spec->psi_dx > 0.0))
    throw qfh::InvalidArgument("wave function grid half width and spacing must be positive");
  const auto cells = static_cast<size_t>(std::llround(2.0 * spec->psi_half_width / spec->psi_dx));
  s.psi = {-spec->psi_half_width * s.fp.sigma, spec->psi_half_width * s.fp.sigma, cells + 1};
  return s;
}

}  // namespace

qfh_status qfh_wigner_grid(const qfh_wigner_spec* spec, double t_bar, double* f_bar) {
  return guarded([&] {
    require(f_bar);
    const auto s = wigner_setup(spec);
    const auto psi = qfh::evolve_free_gaussian(s.fp, s.fp.time(t_bar), s.psi);
    qfh::WignerOptions opts;
    opts.use_exact = spec->use_exact != 0;
    opts.upsample = spec->upsample;
    opts.aliasing_threshold = spec->aliasing_threshold;
    const auto xs = s.xs.nodes();
    const auto vs = s.vs.nodes();
    const auto table =
        qfh::rescale(qfh::wigner_transform(psi, s.fp.mass, s.fp.hbar, xs, vs, opts), s.fp);
    std::copy(table.f.begin(), table.f.end(), f_bar);
  });
}

qfh_status qfh_wigner_nodes(const qfh_wigner_spec* spec, double* x_bar, double* v_bar) {
  return guarded([&] {
    const auto s = wigner_setup(spec);
    if (x_bar)
      for (double x : s.xs.nodes()) *x_bar++ = x / s.fp.sigma;
    if (v_bar)
      for (double v : s.vs.nodes()) *v_bar++ = v / s.fp.velocity_scale();
  });
}

}  // extern "C"
