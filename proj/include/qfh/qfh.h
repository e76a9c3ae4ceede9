#ifndef QFH_QFH_H
#define QFH_QFH_H

/* C interface to the quantum fluid hierarchy library.
 *
 * Every function returns a qfh_status. On failure the message is kept per
 * thread and read back with qfh_last_error(). Handles are opaque and owned
 * by the caller; destroy functions accept NULL. */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(QFH_BUILDING_LIBRARY)
#    define QFH_API __declspec(dllexport)
#  else
#    define QFH_API __declspec(dllimport)
#  endif
#else
#  define QFH_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qfh_status {
  QFH_OK = 0,
  QFH_ERR_INVALID_ARGUMENT = 1,
  QFH_ERR_CONFIG = 2,
  QFH_ERR_NUMERICAL = 3,
  QFH_ERR_IO = 4,
  QFH_ERR_INTERNAL = 5
} qfh_status;

QFH_API const char* qfh_version(void);
/* Message of the last failed call on this thread ("" if none). */
QFH_API const char* qfh_last_error(void);
QFH_API const char* qfh_status_name(qfh_status status);

/* ---- plasma parameters ------------------------------------------------ */

typedef struct qfh_params qfh_params;

/* preset: "nondim" or "si-electron". */
QFH_API qfh_status qfh_params_create(const char* preset, qfh_params** out);
QFH_API qfh_status qfh_params_clone(const qfh_params* params, qfh_params** out);
QFH_API void qfh_params_destroy(qfh_params* params);
/* Applies a key = value file on top of the current values. */
QFH_API qfh_status qfh_params_load_file(qfh_params* params, const char* path);
/* Keys: n0 m e eps0 hbar T0_par T0_perp kB. */
QFH_API qfh_status qfh_params_set(qfh_params* params, const char* key, double value);
QFH_API qfh_status qfh_params_get(const qfh_params* params, const char* key, double* value);
QFH_API size_t qfh_params_key_count(void);
QFH_API const char* qfh_params_key(size_t index);
QFH_API qfh_status qfh_params_validate(const qfh_params* params);
QFH_API qfh_status qfh_params_omega_p(const qfh_params* params, double* out);
/* H = hbar omega_p / (m u0^2). */
QFH_API qfh_status qfh_quantum_parameter(const qfh_params* params, double u0, double* out);
/* Sets hbar so that the quantum parameter equals H. */
QFH_API qfh_status qfh_params_set_quantum_parameter(qfh_params* params, double u0, double H);

/* ---- dispersion relations ---------------------------------------------- */

typedef enum qfh_relation {
  QFH_REL_EQ14 = 0,
  QFH_REL_QUANTUM_LANGMUIR = 1,
  QFH_REL_BOHM_GROSS = 2,
  QFH_REL_ADIABATIC_GAMMA = 3,
  QFH_REL_TEMPERATURE_CLOSURE = 4
} qfh_relation;

#define QFH_RELATION_COUNT 5

QFH_API qfh_status qfh_relation_from_string(const char* tag, qfh_relation* out);
QFH_API const char* qfh_relation_name(qfh_relation relation);
/* gamma is used by QFH_REL_ADIABATIC_GAMMA only. */
QFH_API qfh_status qfh_omega_sq(const qfh_params* params, qfh_relation relation, double k,
                                double gamma, double* out);
QFH_API qfh_status qfh_eq14_excess(const qfh_params* params, double k, double* out);
QFH_API qfh_status qfh_eq14_growing_branch_omega_sq(const qfh_params* params, double k,
                                                    double* out);
/* Fills k_out and omega_sq_out (n entries each). log_spacing != 0 selects a
 * logarithmic sweep. */
QFH_API qfh_status qfh_dispersion_sweep(const qfh_params* params, qfh_relation relation,
                                        double k_min, double k_max, size_t n, int log_spacing,
                                        double gamma, double* k_out, double* omega_sq_out);

/* ---- linear pressure response ------------------------------------------ */

/* Matrices are row-major 3x3. */
QFH_API qfh_status qfh_anisotropic_dyad(const qfh_params* params, double n, double T_perp,
                                        double T_par, double out[9]);
QFH_API qfh_status qfh_delta_p(const qfh_params* params, const double k_vec[3], double omega_sq,
                               double delta_phi, const double P0[9], double out[9]);
/* Poisson mismatch of the closed linear loop for k along z. */
QFH_API qfh_status qfh_dispersion_residual(const qfh_params* params, double k, double omega_sq,
                                           double delta_phi, const double P0[9], double* out);

/* ---- velocity moments ------------------------------------------------- */

typedef struct qfh_moments qfh_moments;

/* Loads a tabulated distribution (header v,f or vx,vy,vz,f). */
QFH_API qfh_status qfh_moments_from_csv(const char* path, double mass, double decay_threshold,
                                        qfh_moments** out);
/* 1D distribution on trapezoid nodes v[0..n). */
QFH_API qfh_status qfh_moments_compute_1d(const double* v, const double* f, size_t n,
                                          double mass, double decay_threshold,
                                          qfh_moments** out);
QFH_API void qfh_moments_destroy(qfh_moments* moments);
QFH_API size_t qfh_moments_component_count(const qfh_moments* moments);
/* Component name (e.g. "n", "u_x", "P_xz") and value. */
QFH_API qfh_status qfh_moments_component(const qfh_moments* moments, size_t index,
                                         const char** name, double* value);
QFH_API int qfh_moments_boundary_violated(const qfh_moments* moments);
QFH_API double qfh_moments_boundary_ratio(const qfh_moments* moments);

/* ---- 1D fluid-Poisson solver ------------------------------------------- */

typedef enum qfh_filter { QFH_FILTER_TWO_THIRDS = 0, QFH_FILTER_BAND = 1 } qfh_filter;
typedef enum qfh_derivative { QFH_DERIV_SPECTRAL = 0, QFH_DERIV_FD6 = 1 } qfh_derivative;

typedef struct qfh_fluid_config {
  size_t N;
  double L;
  qfh_filter filter;
  size_t band_max_mode;
  qfh_derivative derivative;
  double cfl;
  double steepening_threshold;
  double poisson_tolerance;
} qfh_fluid_config;

typedef struct qfh_perturbation {
  int mode;
  double amplitude; /* relative to n0 */
  int eigenmode;    /* nonzero: Langmuir eigenvector */
  int fields[4];    /* n, u, p, Q when eigenmode == 0 */
} qfh_perturbation;

typedef struct qfh_probe {
  double t;
  double n_mode;
  double n_point;
  double u_point;
  double mass;
} qfh_probe;

typedef void (*qfh_probe_fn)(const qfh_probe* probe, void* user);

typedef struct qfh_fluid qfh_fluid;

QFH_API void qfh_fluid_config_default(qfh_fluid_config* config);
QFH_API void qfh_perturbation_default(qfh_perturbation* perturbation);
QFH_API qfh_status qfh_fluid_create(const qfh_params* params, const qfh_fluid_config* config,
                                    qfh_fluid** out);
QFH_API void qfh_fluid_destroy(qfh_fluid* fluid);
/* Background density is n0; perturbation may be NULL. */
QFH_API qfh_status qfh_fluid_init(qfh_fluid* fluid, double u_bg, double p_bg, double Q_bg,
                                  const qfh_perturbation* perturbation);
QFH_API qfh_status qfh_fluid_wavenumber(const qfh_fluid* fluid, int mode, double* out);
QFH_API qfh_status qfh_fluid_max_stable_dt(const qfh_fluid* fluid, double* out);
QFH_API qfh_status qfh_fluid_step(qfh_fluid* fluid, double dt);
/* Fixed-step run to t + t_end. dt <= 0 picks the stability limit. */
QFH_API qfh_status qfh_fluid_run(qfh_fluid* fluid, double t_end, double dt, size_t probe_every,
                                 int probe_mode, qfh_probe_fn on_probe, void* user,
                                 size_t* steps, double* dt_used);
QFH_API qfh_status qfh_fluid_time(const qfh_fluid* fluid, double* out);
QFH_API size_t qfh_fluid_size(const qfh_fluid* fluid);
/* Any output pointer may be NULL; arrays hold qfh_fluid_size() entries. */
QFH_API qfh_status qfh_fluid_fields(const qfh_fluid* fluid, double* x, double* n, double* u,
                                    double* p, double* Q, double* phi);
QFH_API qfh_status qfh_fluid_total_mass(const qfh_fluid* fluid, double* out);
QFH_API qfh_status qfh_measure_frequency(const double* samples, size_t n, double dt,
                                         double* out);

/* ---- traveling waves -------------------------------------------------- */

typedef struct qfh_tw_state {
  double xi, u, p, Q, phi, psi;
} qfh_tw_state;

typedef struct qfh_wave_frame {
  double v;
  double u0;
  double sonic_epsilon;
} qfh_wave_frame;

typedef struct qfh_trajectory qfh_trajectory;

QFH_API void qfh_wave_frame_default(qfh_wave_frame* frame);
QFH_API qfh_status qfh_tw_fig23_initial(const qfh_params* params, const qfh_wave_frame* frame,
                                        qfh_tw_state* out);
QFH_API qfh_status qfh_tw_equilibrium(const qfh_params* params, const qfh_wave_frame* frame,
                                      double p0, qfh_tw_state* out);
QFH_API qfh_status qfh_tw_density(const qfh_params* params, const qfh_wave_frame* frame,
                                  const qfh_tw_state* state, double* out);
/* out = (u', p', Q', phi', psi'). */
QFH_API qfh_status qfh_tw_rhs(const qfh_params* params, const qfh_wave_frame* frame,
                              const qfh_tw_state* state, double out[5]);
/* sample_step <= 0 gives 1000 intervals. A singularity is not an error:
 * the partial trajectory carries the halt message. */
QFH_API qfh_status qfh_tw_integrate(const qfh_params* params, const qfh_wave_frame* frame,
                                    const qfh_tw_state* initial, double xi_end, double rel_tol,
                                    double abs_tol, double sample_step, qfh_trajectory** out);
QFH_API void qfh_trajectory_destroy(qfh_trajectory* trajectory);
QFH_API size_t qfh_trajectory_size(const qfh_trajectory* trajectory);
QFH_API qfh_status qfh_trajectory_sample(const qfh_trajectory* trajectory, size_t index,
                                         qfh_tw_state* state, double* n);
/* 1 when the run stopped at a singularity. */
QFH_API int qfh_trajectory_halted(const qfh_trajectory* trajectory);
QFH_API const char* qfh_trajectory_message(const qfh_trajectory* trajectory);
/* Nondimensional eigenvalues of the equilibrium linearization. */
QFH_API qfh_status qfh_tw_eigenvalues(const qfh_params* params, const qfh_wave_frame* frame,
                                      double p0, double re[5], double im[5], int* center_like);
/* Bisection over H with params and u0 fixed (hbar varies). p0_bar is the
 * equilibrium pressure in units of m n0 u0^2. */
QFH_API qfh_status qfh_tw_threshold(const qfh_params* params, const qfh_wave_frame* frame,
                                    double p0_bar, double H_lo, double H_hi, double tol,
                                    double* out);

/* ---- free-particle Wigner function ------------------------------------ */

typedef struct qfh_wigner_spec {
  double mass, hbar, sigma;
  /* Output grid in rescaled units. */
  double x_lo, x_hi;
  size_t nx;
  double v_lo, v_hi;
  size_t nv;
  /* Wave function grid: x_bar in [-psi_half_width, psi_half_width]. */
  double psi_half_width;
  double psi_dx;
  int use_exact;
  size_t upsample;
  double aliasing_threshold;
} qfh_wigner_spec;

QFH_API void qfh_wigner_spec_default(qfh_wigner_spec* spec);
QFH_API double qfh_wigner_analytic(double x_bar, double v_bar, double t_bar);
/* f_bar[ix * nv + iv] on the rescaled grid at time t_bar. */
QFH_API qfh_status qfh_wigner_grid(const qfh_wigner_spec* spec, double t_bar, double* f_bar);
/* Fills the rescaled node coordinates (nx and nv entries). */
QFH_API qfh_status qfh_wigner_nodes(const qfh_wigner_spec* spec, double* x_bar, double* v_bar);

#ifdef __cplusplus
}
#endif

#endif
