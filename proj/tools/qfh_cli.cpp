// qfh: command-line front end over the C API.
//
// Every CSV starts with one comment line holding the fully resolved command
// (output paths excluded), then a header row. `qfh replay FILE` re-runs it.

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "qfh/qfh.h"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;
constexpr int exit_io = 4;

struct Failure {
  int code;
  std::string message;
};

int exit_code(qfh_status s) {
  switch (s) {
    case QFH_OK: return exit_ok;
    case QFH_ERR_INVALID_ARGUMENT:
    case QFH_ERR_CONFIG: return exit_config;
    case QFH_ERR_NUMERICAL: return exit_numerical;
    case QFH_ERR_IO: return exit_io;
    default: return 1;
  }
}

void check(qfh_status s) {
  if (s != QFH_OK) throw Failure{exit_code(s), qfh_last_error()};
}

std::string num(double v) {
  char buf[40];
  if (v == 0.0) v = 0.0;  // no "-0" in output
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string arg_num(double v) {
  char buf[40];
  if (v == 0.0) v = 0.0;
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote(const std::string& s) {
  if (!s.empty() && s.find_first_of(" \t'\"\\#") == std::string::npos) return s;
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

std::vector<std::string> split_command(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool in_token = false, in_quote = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quote) {
      if (c == '\'') in_quote = false;
      else cur += c;
    } else if (c == '\'') {
      in_quote = in_token = true;
    } else if (c == '\\' && i + 1 < line.size()) {
      cur += line[++i];
      in_token = true;
    } else if (c == ' ' || c == '\t') {
      if (in_token) out.push_back(cur);
      cur.clear();
      in_token = false;
    } else {
      cur += c;
      in_token = true;
    }
  }
  if (in_quote) throw Failure{exit_config, "unterminated quote in recorded command"};
  if (in_token) out.push_back(cur);
  return out;
}

// Canonical argument list written to the comment line.
class Command {
 public:
  explicit Command(std::string sub) { words_.push_back(std::move(sub)); }
  Command& word(const std::string& w) { words_.push_back(w); return *this; }
  Command& opt(const std::string& name, double v) { return opt(name, arg_num(v)); }
  Command& opt(const std::string& name, const std::string& v) {
    words_.push_back(name);
    words_.push_back(quote(v));
    return *this;
  }
  Command& flag(const std::string& name, bool on) {
    if (on) words_.push_back(name);
    return *this;
  }
  std::string line() const {
    std::string s = "# qfh";
    for (const auto& w : words_) s += " " + w;
    return s;
  }

 private:
  std::vector<std::string> words_;
};

// Writes to a temporary sibling and renames on commit; "-" is stdout.
class OutputFile {
 public:
  explicit OutputFile(std::string path) : path_(std::move(path)) {
    if (path_ == "-") return;
    tmp_ = path_ + ".tmp." + std::to_string(::getpid());
    file_.open(tmp_, std::ios::out | std::ios::trunc);
    if (!file_) throw Failure{exit_io, "cannot open '" + tmp_ + "' for writing: " + std::strerror(errno)};
  }
  ~OutputFile() {
    if (!tmp_.empty() && !committed_) std::remove(tmp_.c_str());
  }
  std::ostream& out() { return path_ == "-" ? std::cout : file_; }
  void commit() {
    if (path_ == "-") {
      std::cout.flush();
      return;
    }
    file_.flush();
    if (!file_) throw Failure{exit_io, "write to '" + tmp_ + "' failed"};
    file_.close();
    if (std::rename(tmp_.c_str(), path_.c_str()) != 0)
      throw Failure{exit_io, "cannot rename '" + tmp_ + "' to '" + path_ + "': " + std::strerror(errno)};
    committed_ = true;
  }

 private:
  std::string path_;
  std::string tmp_;
  std::ofstream file_;
  bool committed_ = false;
};

void write_row(std::ostream& os, const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
  os << '\n';
}

struct ParamsDeleter {
  void operator()(qfh_params* p) const { qfh_params_destroy(p); }
};
using Params = std::unique_ptr<qfh_params, ParamsDeleter>;

double get(const qfh_params* p, const char* key) {
  double v = 0.0;
  check(qfh_params_get(p, key, &v));
  return v;
}

// Options shared by every computing subcommand.
struct Common {
  std::string preset = "nondim";
  std::string params_file;
  std::vector<std::optional<double>> overrides = std::vector<std::optional<double>>(qfh_params_key_count());
  std::string output = "-";

  void attach(CLI::App* app, const std::string& output_help) {
    app->add_option("--preset", preset, "Parameter preset")
        ->check(CLI::IsMember({"nondim", "si-electron"}))
        ->capture_default_str();
    app->add_option("--params", params_file, "key = value parameter file applied on the preset")
        ->check(CLI::ExistingFile);
    for (std::size_t i = 0; i < overrides.size(); ++i) {
      const std::string key = qfh_params_key(i);
      app->add_option("--" + key, overrides[i], "Override " + key);
    }
    app->add_option("-o,--output", output, output_help)->capture_default_str();
  }

  Params resolve() const {
    qfh_params* raw = nullptr;
    check(qfh_params_create(preset.c_str(), &raw));
    Params p(raw);
    if (!params_file.empty()) check(qfh_params_load_file(p.get(), params_file.c_str()));
    for (std::size_t i = 0; i < overrides.size(); ++i)
      if (overrides[i]) check(qfh_params_set(p.get(), qfh_params_key(i), *overrides[i]));
    check(qfh_params_validate(p.get()));
    return p;
  }

  // Preset plus every resolved parameter value.
  void record(Command& cmd, const qfh_params* p) const {
    cmd.opt("--preset", preset);
    for (std::size_t i = 0; i < qfh_params_key_count(); ++i) {
      const char* key = qfh_params_key(i);
      cmd.opt(std::string("--") + key, get(p, key));
    }
  }
};

// ---- dispersion -----------------------------------------------------------

struct DispersionCmd {
  Common common;
  std::string relation = "eq14";
  double kmin = 0.0, kmax = 2.0, gamma = 5.0 / 3.0;
  std::size_t n = 101;
  bool log = false, compare = false, eq14_sweep = false;
  CLI::App* app = nullptr;

  void attach(CLI::App& parent) {
    app = parent.add_subcommand("dispersion", "Sweep a Langmuir dispersion relation over k");
    app->add_option("--relation", relation,
                    "eq14, quantum_langmuir, bohm_gross, adiabatic_gamma, temperature_closure")
        ->capture_default_str();
    app->add_option("--kmin", kmin, "Smallest wavenumber")->check(CLI::NonNegativeNumber)->capture_default_str();
    app->add_option("--kmax", kmax, "Largest wavenumber")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--n", n, "Number of wavenumbers")->check(CLI::Range(2, 10000000))->capture_default_str();
    app->add_flag("--log", log, "Logarithmic spacing");
    app->add_option("--gamma", gamma, "Adiabatic index for adiabatic_gamma")->capture_default_str();
    app->add_flag("--compare", compare, "All five relations side by side (omega_sq columns)");
    app->add_flag("--eq14-sweep", eq14_sweep,
                  "Preset: eq14 against its limits, k in [1e-3, 1], 301 log-spaced points");
    common.attach(app, "CSV path or - for stdout");
  }

  void run() {
    if (eq14_sweep) {
      if (!app->count("--kmin")) kmin = 1e-3;
      if (!app->count("--kmax")) kmax = 1.0;
      if (!app->count("--n")) n = 301;
      log = compare = true;
    }
    qfh_relation rel;
    check(qfh_relation_from_string(relation.c_str(), &rel));
    const Params p = common.resolve();

    Command cmd("dispersion");
    cmd.opt("--relation", relation).opt("--kmin", kmin).opt("--kmax", kmax)
        .opt("--n", static_cast<double>(n)).flag("--log", log).opt("--gamma", gamma)
        .flag("--compare", compare);
    common.record(cmd, p.get());

    std::vector<double> k(n), w2(n);
    OutputFile file(common.output);
    auto& os = file.out();
    os << cmd.line() << '\n';
    if (!compare) {
      check(qfh_dispersion_sweep(p.get(), rel, kmin, kmax, n, log, gamma, k.data(), w2.data()));
      os << "k,omega_sq,omega,relation\n";
      for (std::size_t i = 0; i < n; ++i)
        write_row(os, {num(k[i]), num(w2[i]), num(std::sqrt(w2[i])), qfh_relation_name(rel)});
    } else {
      std::vector<std::vector<double>> cols(QFH_RELATION_COUNT, std::vector<double>(n));
      std::vector<std::string> header{"k"};
      for (int r = 0; r < QFH_RELATION_COUNT; ++r) {
        const auto rr = static_cast<qfh_relation>(r);
        check(qfh_dispersion_sweep(p.get(), rr, kmin, kmax, n, log, gamma, k.data(),
                                   cols[static_cast<std::size_t>(r)].data()));
        header.push_back(qfh_relation_name(rr));
      }
      write_row(os, header);
      for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::string> row{num(k[i])};
        for (const auto& c : cols) row.push_back(num(c[i]));
        write_row(os, row);
      }
    }
    file.commit();
  }
};

// ---- linear response ------------------------------------------------------

struct LinearResponseCmd {
  Common common;
  double kmin = 0.1, kmax = 2.0, delta_phi = 1e-3, theta = 0.0;
  std::size_t n = 20;
  bool log = false;
  std::string relation = "eq14";
  CLI::App* app = nullptr;

  void attach(CLI::App& parent) {
    app = parent.add_subcommand("linear-response",
                                "Pressure-dyad perturbation of a Langmuir wave over a k sweep");
    app->add_option("--kmin", kmin, "Smallest wavenumber")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--kmax", kmax, "Largest wavenumber")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--n", n, "Number of wavenumbers")->check(CLI::Range(2, 10000000))->capture_default_str();
    app->add_flag("--log", log, "Logarithmic spacing");
    app->add_option("--delta-phi", delta_phi, "Potential amplitude")->capture_default_str();
    app->add_option("--theta", theta, "Angle between k and the z axis (radians), k in the x-z plane")
        ->capture_default_str();
    app->add_option("--omega-relation", relation, "Relation supplying omega^2 at each k")
        ->capture_default_str();
    common.attach(app, "CSV path or - for stdout");
  }

  void run() {
    qfh_relation rel;
    check(qfh_relation_from_string(relation.c_str(), &rel));
    const Params p = common.resolve();
    Command cmd("linear-response");
    cmd.opt("--kmin", kmin).opt("--kmax", kmax).opt("--n", static_cast<double>(n))
        .flag("--log", log).opt("--delta-phi", delta_phi).opt("--theta", theta)
        .opt("--omega-relation", relation);
    common.record(cmd, p.get());

    std::vector<double> k(n), w2(n);
    check(qfh_dispersion_sweep(p.get(), rel, kmin, kmax, n, log, 5.0 / 3.0, k.data(), w2.data()));
    double P0[9];
    check(qfh_anisotropic_dyad(p.get(), get(p.get(), "n0"), get(p.get(), "T0_perp"),
                               get(p.get(), "T0_par"), P0));

    OutputFile file(common.output);
    auto& os = file.out();
    os << cmd.line() << '\n';
    os << "k,omega_sq,dP_xx,dP_xy,dP_xz,dP_yy,dP_yz,dP_zz\n";
    for (std::size_t i = 0; i < n; ++i) {
      const double kv[3] = {k[i] * std::sin(theta), 0.0, k[i] * std::cos(theta)};
      double d[9];
      check(qfh_delta_p(p.get(), kv, w2[i], delta_phi, P0, d));
      write_row(os, {num(k[i]), num(w2[i]), num(d[0]), num(d[1]), num(d[2]), num(d[4]), num(d[5]),
                     num(d[8])});
    }
    file.commit();
  }
};

// ---- fluid1d --------------------------------------------------------------

struct FluidDeleter {
  void operator()(qfh_fluid* f) const { qfh_fluid_destroy(f); }
};

struct Fluid1DCmd {
  Common common;
  std::size_t N = 256;
  double L = 2.0 * M_PI;
  std::optional<double> wavenumber;
  std::string filter = "two_thirds", derivative = "spectral";
  std::size_t band_modes = 1;
  double cfl = 0.4, steepening = 0.5, dt = 0.0;
  std::optional<double> t_end;
  double periods = 10.0;
  int mode = 1;
  double amplitude = 1e-6;
  std::vector<std::string> fields;
  double u_bg = 0.0, Q_bg = 0.0;
  std::optional<double> p_bg;
  std::size_t probe_every = 1;
  std::string snapshot;
  CLI::App* app = nullptr;

  void attach(CLI::App& parent) {
    app = parent.add_subcommand("fluid1d", "Periodic 1D fluid-Poisson run of the moment hierarchy");
    app->add_option("--N", N, "Grid points")->check(CLI::Range(8, 1 << 20))->capture_default_str();
    app->add_option("--L", L, "Domain length")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--wavenumber", wavenumber,
                    "Sets L so that the perturbed mode has this wavenumber")
        ->check(CLI::PositiveNumber);
    app->add_option("--filter", filter, "two_thirds or band")
        ->check(CLI::IsMember({"two_thirds", "band"}))->capture_default_str();
    app->add_option("--band-modes", band_modes, "Highest mode kept by the band filter")
        ->capture_default_str();
    app->add_option("--derivative", derivative, "spectral or fd6")
        ->check(CLI::IsMember({"spectral", "fd6"}))->capture_default_str();
    app->add_option("--cfl", cfl, "Safety factor on the stability limit")
        ->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--steepening", steepening, "Halt threshold for the per-cell density jump")
        ->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--dt", dt, "Time step (0 = stability limit)")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    app->add_option("--t-end", t_end, "End time (default: --periods of the eq14 frequency)")
        ->check(CLI::PositiveNumber);
    app->add_option("--periods", periods, "Run length in eq14 periods of the perturbed mode")
        ->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--mode", mode, "Perturbed Fourier mode")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--amplitude", amplitude, "Density amplitude relative to n0")->capture_default_str();
    app->add_option("--fields", fields, "Perturb these fields with cos(kx) instead of the eigenmode")
        ->delimiter(',')->check(CLI::IsMember({"n", "u", "p", "Q"}));
    app->add_option("--u-bg", u_bg, "Background velocity")->capture_default_str();
    app->add_option("--p-bg", p_bg, "Background pressure (default n0 kB T0_par)");
    app->add_option("--Q-bg", Q_bg, "Background heat flux")->capture_default_str();
    app->add_option("--probe-every", probe_every, "Probe cadence in steps")
        ->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--snapshot", snapshot, "Also write the final fields to this CSV");
    common.attach(app, "Probe time-series CSV path or - for stdout");
  }

  void run() {
    const Params p = common.resolve();
    const double n0 = get(p.get(), "n0"), kB = get(p.get(), "kB");
    const double pb = p_bg ? *p_bg : n0 * kB * get(p.get(), "T0_par");
    if (wavenumber) L = 2.0 * M_PI * mode / *wavenumber;
    const double k = 2.0 * M_PI * mode / L;

    // Linear frequency of the perturbed mode for the default run length.
    qfh_params* raw = nullptr;
    check(qfh_params_clone(p.get(), &raw));
    const Params eff(raw);
    check(qfh_params_set(eff.get(), "T0_par", pb / (n0 * kB)));
    double w2 = 0.0;
    check(qfh_omega_sq(eff.get(), QFH_REL_EQ14, k, 5.0 / 3.0, &w2));
    const double omega = std::sqrt(w2);
    const double tend = t_end ? *t_end : periods * 2.0 * M_PI / omega;

    Command cmd("fluid1d");
    cmd.opt("--N", static_cast<double>(N)).opt("--L", L).opt("--filter", filter)
        .opt("--band-modes", static_cast<double>(band_modes)).opt("--derivative", derivative)
        .opt("--cfl", cfl).opt("--steepening", steepening).opt("--dt", dt).opt("--t-end", tend)
        .opt("--mode", mode).opt("--amplitude", amplitude);
    if (!fields.empty()) {
      std::string joined;
      for (const auto& f : fields) joined += (joined.empty() ? "" : ",") + f;
      cmd.opt("--fields", joined);
    }
    cmd.opt("--u-bg", u_bg).opt("--p-bg", pb).opt("--Q-bg", Q_bg)
        .opt("--probe-every", static_cast<double>(probe_every));
    common.record(cmd, p.get());

    qfh_fluid_config cfg;
    qfh_fluid_config_default(&cfg);
    cfg.N = N;
    cfg.L = L;
    cfg.filter = filter == "band" ? QFH_FILTER_BAND : QFH_FILTER_TWO_THIRDS;
    cfg.band_max_mode = band_modes;
    cfg.derivative = derivative == "fd6" ? QFH_DERIV_FD6 : QFH_DERIV_SPECTRAL;
    cfg.cfl = cfl;
    cfg.steepening_threshold = steepening;
    qfh_fluid* fraw = nullptr;
    check(qfh_fluid_create(p.get(), &cfg, &fraw));
    std::unique_ptr<qfh_fluid, FluidDeleter> fluid(fraw);

    qfh_perturbation pert;
    qfh_perturbation_default(&pert);
    pert.mode = mode;
    pert.amplitude = amplitude;
    if (!fields.empty()) {
      pert.eigenmode = 0;
      const char* names[4] = {"n", "u", "p", "Q"};
      for (int i = 0; i < 4; ++i) {
        pert.fields[i] = 0;
        for (const auto& f : fields)
          if (f == names[i]) pert.fields[i] = 1;
      }
    }
    check(qfh_fluid_init(fluid.get(), u_bg, pb, Q_bg, &pert));

    std::vector<qfh_probe> probes;
    auto collect = [](const qfh_probe* pr, void* user) {
      static_cast<std::vector<qfh_probe>*>(user)->push_back(*pr);
    };
    std::size_t steps = 0;
    double dt_used = 0.0;
    const qfh_status st =
        qfh_fluid_run(fluid.get(), tend, dt, probe_every, mode, collect, &probes, &steps, &dt_used);
    if (st != QFH_OK) throw Failure{exit_code(st), qfh_last_error()};

    OutputFile file(common.output);
    auto& os = file.out();
    os << cmd.line() << '\n';
    os << "t,n_mode,n_point,u_point,mass\n";
    for (const auto& pr : probes)
      write_row(os, {num(pr.t), num(pr.n_mode), num(pr.n_point), num(pr.u_point), num(pr.mass)});
    file.commit();

    if (!snapshot.empty()) {
      const std::size_t n = qfh_fluid_size(fluid.get());
      std::vector<double> x(n), nn(n), u(n), pp(n), Q(n), phi(n);
      check(qfh_fluid_fields(fluid.get(), x.data(), nn.data(), u.data(), pp.data(), Q.data(),
                             phi.data()));
      OutputFile snap(snapshot);
      auto& ss = snap.out();
      ss << cmd.line() << '\n';
      ss << "x,n,u,p,Q,phi\n";
      for (std::size_t i = 0; i < n; ++i)
        write_row(ss, {num(x[i]), num(nn[i]), num(u[i]), num(pp[i]), num(Q[i]), num(phi[i])});
      snap.commit();
    }

    std::vector<double> series;
    for (const auto& pr : probes) series.push_back(pr.n_mode);
    double measured = 0.0;
    std::cerr << "fluid1d: " << steps << " steps of dt = " << dt_used << "; eq14 omega = " << omega;
    if (qfh_measure_frequency(series.data(), series.size(), dt_used * probe_every, &measured) == QFH_OK)
      std::cerr << ", measured omega = " << measured;
    std::cerr << '\n';
  }
};

// ---- traveling waves ------------------------------------------------------

struct TrajectoryDeleter {
  void operator()(qfh_trajectory* t) const { qfh_trajectory_destroy(t); }
};

struct TravelingCmd {
  Common run_common, stab_common, thr_common;
  CLI::App *tw = nullptr, *run_app = nullptr, *stab_app = nullptr, *thr_app = nullptr;

  // shared frame options, one copy per action
  struct Frame {
    double v = 0.0, u0 = 1.0, sonic_eps = 1e-8;
    std::optional<double> H;
    void attach(CLI::App* app) {
      app->add_option("--v", v, "Frame speed")->capture_default_str();
      app->add_option("--u0", u0, "Reference velocity (nonzero)")->capture_default_str();
      app->add_option("--sonic-eps", sonic_eps, "Minimum |u - v|/|u0|")->capture_default_str();
      app->add_option("--H", H, "Quantum parameter hbar omega_p/(m u0^2); sets hbar")
          ->check(CLI::NonNegativeNumber);
    }
    qfh_wave_frame frame() const {
      qfh_wave_frame f;
      qfh_wave_frame_default(&f);
      f.v = v;
      f.u0 = u0;
      f.sonic_epsilon = sonic_eps;
      return f;
    }
    void apply(qfh_params* p) const {
      if (H) check(qfh_params_set_quantum_parameter(p, u0, *H));
      check(qfh_params_validate(p));
    }
    void record(Command& cmd) const {
      cmd.opt("--v", v).opt("--u0", u0).opt("--sonic-eps", sonic_eps);
    }
  } run_frame, stab_frame, thr_frame;

  // run
  bool fig23 = false;
  double u_init = NAN, p_init = 0.0, Q_init = 0.0, phi_init = 0.0, psi_init = 0.0;
  double xi_max = 200.0, rtol = 1e-9, atol = 1e-12, sample_step = 0.0;
  // stability
  double H_min = 0.0, H_max = 3.0, p0_bar = 1.0;
  std::size_t H_n = 31;
  // threshold
  double H_lo = 1.0, H_hi = 3.0, tol = 1e-7, thr_p0_bar = 1.0;

  void attach(CLI::App& parent) {
    tw = parent.add_subcommand("tw", "Traveling-wave reduction");
    tw->require_subcommand(1);

    run_app = tw->add_subcommand("run", "Integrate the wave-frame ODEs");
    run_frame.attach(run_app);
    run_app->add_flag("--fig23-ic", fig23, "n(0) = 2n0/3, p(0) = m n0 u0^2, Q = phi = phi' = 0");
    run_app->add_option("--u-init", u_init, "Initial u (default u0 + v)");
    run_app->add_option("--p-init", p_init, "Initial pressure")->capture_default_str();
    run_app->add_option("--Q-init", Q_init, "Initial heat flux")->capture_default_str();
    run_app->add_option("--phi-init", phi_init, "Initial potential")->capture_default_str();
    run_app->add_option("--psi-init", psi_init, "Initial dphi/dxi")->capture_default_str();
    run_app->add_option("--xi-max", xi_max, "End of the xi interval (may be negative)")
        ->capture_default_str();
    run_app->add_option("--rtol", rtol, "Relative tolerance")->check(CLI::PositiveNumber)->capture_default_str();
    run_app->add_option("--atol", atol, "Absolute tolerance (nondimensional)")
        ->check(CLI::PositiveNumber)->capture_default_str();
    run_app->add_option("--sample-step", sample_step, "Output spacing in xi (0 = 1000 intervals)")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    run_common.attach(run_app, "CSV path or - for stdout");

    stab_app = tw->add_subcommand("stability", "Equilibrium eigenvalues over a range of H");
    stab_frame.attach(stab_app);
    stab_app->add_option("--H-min", H_min, "First H")->check(CLI::NonNegativeNumber)->capture_default_str();
    stab_app->add_option("--H-max", H_max, "Last H")->check(CLI::NonNegativeNumber)->capture_default_str();
    stab_app->add_option("--H-n", H_n, "Number of H values")->check(CLI::Range(2, 1000000))->capture_default_str();
    stab_app->add_option("--p0-bar", p0_bar, "Equilibrium pressure in m n0 u0^2")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    stab_common.attach(stab_app, "CSV path or - for stdout");

    thr_app = tw->add_subcommand("threshold", "Bisect the stability threshold in H");
    thr_frame.attach(thr_app);
    thr_app->add_option("--H-lo", H_lo, "Lower bracket")->check(CLI::NonNegativeNumber)->capture_default_str();
    thr_app->add_option("--H-hi", H_hi, "Upper bracket")->check(CLI::NonNegativeNumber)->capture_default_str();
    thr_app->add_option("--tol", tol, "Bracket width at exit")->check(CLI::PositiveNumber)->capture_default_str();
    thr_app->add_option("--p0-bar", thr_p0_bar, "Equilibrium pressure in m n0 u0^2")
        ->check(CLI::NonNegativeNumber)->capture_default_str();
    thr_common.attach(thr_app, "CSV path or - for stdout");
  }

  void run() {
    if (run_app->parsed()) run_traj();
    else if (stab_app->parsed()) run_stability();
    else run_threshold();
  }

  void run_traj() {
    Params p = run_common.resolve();
    run_frame.apply(p.get());
    const qfh_wave_frame frame = run_frame.frame();
    qfh_tw_state init{0.0, std::isnan(u_init) ? run_frame.u0 + run_frame.v : u_init,
                      p_init, Q_init, phi_init, psi_init};
    if (fig23) check(qfh_tw_fig23_initial(p.get(), &frame, &init));

    Command cmd("tw");
    cmd.word("run");
    run_frame.record(cmd);
    cmd.flag("--fig23-ic", fig23);
    if (!fig23)
      cmd.opt("--u-init", init.u).opt("--p-init", init.p).opt("--Q-init", init.Q)
          .opt("--phi-init", init.phi).opt("--psi-init", init.psi);
    cmd.opt("--xi-max", xi_max).opt("--rtol", rtol).opt("--atol", atol)
        .opt("--sample-step", sample_step);
    run_common.record(cmd, p.get());

    qfh_trajectory* raw = nullptr;
    check(qfh_tw_integrate(p.get(), &frame, &init, xi_max, rtol, atol, sample_step, &raw));
    std::unique_ptr<qfh_trajectory, TrajectoryDeleter> traj(raw);

    OutputFile file(run_common.output);
    auto& os = file.out();
    os << cmd.line() << '\n';
    os << "xi,n,u,p,Q,phi,E\n";
    for (std::size_t i = 0; i < qfh_trajectory_size(traj.get()); ++i) {
      qfh_tw_state s;
      double n = 0.0;
      check(qfh_trajectory_sample(traj.get(), i, &s, &n));
      write_row(os, {num(s.xi), num(n), num(s.u), num(s.p), num(s.Q), num(s.phi), num(-s.psi)});
    }
    file.commit();
    if (qfh_trajectory_halted(traj.get()))
      throw Failure{exit_numerical, std::string("trajectory halted: ") +
                                        qfh_trajectory_message(traj.get())};
  }

  void run_stability() {
    Params p = stab_common.resolve();
    stab_frame.apply(p.get());
    const qfh_wave_frame frame = stab_frame.frame();
    Command cmd("tw");
    cmd.word("stability");
    stab_frame.record(cmd);
    cmd.opt("--H-min", H_min).opt("--H-max", H_max).opt("--H-n", static_cast<double>(H_n))
        .opt("--p0-bar", p0_bar);
    stab_common.record(cmd, p.get());

    const double m = get(p.get(), "m"), n0 = get(p.get(), "n0");
    const double p0 = p0_bar * m * n0 * frame.u0 * frame.u0;

    OutputFile file(stab_common.output);
    auto& os = file.out();
    os << cmd.line() << '\n';
    os << "H,max_real,classification";
    for (int i = 1; i <= 5; ++i) os << ",re_" << i << ",im_" << i;
    os << '\n';
    for (std::size_t j = 0; j < H_n; ++j) {
      const double H = H_min + (H_max - H_min) * static_cast<double>(j) / static_cast<double>(H_n - 1);
      check(qfh_params_set_quantum_parameter(p.get(), frame.u0, H));
      double re[5], im[5];
      int center = 0;
      const qfh_status st = qfh_tw_eigenvalues(p.get(), &frame, p0, re, im, &center);
      std::vector<std::string> row{num(H)};
      if (st == QFH_ERR_NUMERICAL) {
        row.push_back("nan");
        row.push_back("singular");
        for (int i = 0; i < 10; ++i) row.push_back("nan");
      } else {
        check(st);
        double mr = re[0];
        for (double r : re) mr = std::max(mr, r);
        row.push_back(num(mr));
        row.push_back(center ? "center" : "unstable");
        for (int i = 0; i < 5; ++i) {
          row.push_back(num(re[i]));
          row.push_back(num(im[i]));
        }
      }
      write_row(os, row);
    }
    file.commit();
  }

  void run_threshold() {
    Params p = thr_common.resolve();
    thr_frame.apply(p.get());
    const qfh_wave_frame frame = thr_frame.frame();
    Command cmd("tw");
    cmd.word("threshold");
    thr_frame.record(cmd);
    cmd.opt("--H-lo", H_lo).opt("--H-hi", H_hi).opt("--tol", tol).opt("--p0-bar", thr_p0_bar);
    thr_common.record(cmd, p.get());
    double H_crit = 0.0;
    check(qfh_tw_threshold(p.get(), &frame, thr_p0_bar, H_lo, H_hi, tol, &H_crit));
    OutputFile file(thr_common.output);
    auto& os = file.out();
    os << cmd.line() << '\n';
    os << "H_crit\n" << num(H_crit) << '\n';
    file.commit();
  }
};

// ---- wigner ---------------------------------------------------------------

struct WignerCmd {
  Common common;
  std::vector<double> tbar{0.0, 2.0, 4.0, 6.0};
  bool fig1 = false, generic = false;
  qfh_wigner_spec spec{};
  CLI::App* app = nullptr;

  void attach(CLI::App& parent) {
    qfh_wigner_spec_default(&spec);
    app = parent.add_subcommand("wigner", "Wigner function of the freely evolving Gaussian packet");
    app->add_option("--tbar", tbar, "Rescaled times")->delimiter(',')->capture_default_str();
    app->add_flag("--fig1", fig1, "Preset: t_bar = 0,2,4,6 on the default grids");
    app->add_option("--sigma", spec.sigma, "Initial packet width")->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--x-min", spec.x_lo, "Lowest x_bar")->capture_default_str();
    app->add_option("--x-max", spec.x_hi, "Highest x_bar")->capture_default_str();
    app->add_option("--nx", spec.nx, "x nodes")->check(CLI::Range(2, 1000000))->capture_default_str();
    app->add_option("--v-min", spec.v_lo, "Lowest v_bar")->capture_default_str();
    app->add_option("--v-max", spec.v_hi, "Highest v_bar")->capture_default_str();
    app->add_option("--nv", spec.nv, "v nodes")->check(CLI::Range(2, 1000000))->capture_default_str();
    app->add_option("--psi-half-width", spec.psi_half_width, "Wave function grid half width in x_bar")
        ->check(CLI::PositiveNumber)->capture_default_str();
    app->add_option("--psi-dx", spec.psi_dx, "Wave function grid spacing in x_bar")
        ->check(CLI::PositiveNumber)->capture_default_str();
    app->add_flag("--generic", generic, "Interpolate the sampled wave function instead of the exact formula");
    app->add_option("--upsample", spec.upsample, "Fourier upsampling factor (generic path)")
        ->check(CLI::PositiveNumber)->capture_default_str();
    common.output = "wigner";
    common.attach(app, "Output prefix; writes PREFIX_t<tbar>.csv");
  }

  void run() {
    if (fig1) {
      qfh_wigner_spec d;
      qfh_wigner_spec_default(&d);
      const double sigma = spec.sigma;
      spec = d;
      spec.sigma = sigma;
      tbar = {0.0, 2.0, 4.0, 6.0};
    }
    const Params p = common.resolve();
    spec.mass = get(p.get(), "m");
    spec.hbar = get(p.get(), "hbar");
    spec.use_exact = generic ? 0 : 1;

    std::string times;
    for (double t : tbar) times += (times.empty() ? "" : ",") + arg_num(t);
    Command cmd("wigner");
    cmd.opt("--tbar", times).opt("--sigma", spec.sigma).opt("--x-min", spec.x_lo)
        .opt("--x-max", spec.x_hi).opt("--nx", static_cast<double>(spec.nx))
        .opt("--v-min", spec.v_lo).opt("--v-max", spec.v_hi)
        .opt("--nv", static_cast<double>(spec.nv)).opt("--psi-half-width", spec.psi_half_width)
        .opt("--psi-dx", spec.psi_dx).flag("--generic", generic)
        .opt("--upsample", static_cast<double>(spec.upsample));
    common.record(cmd, p.get());

    std::vector<double> xb(spec.nx), vb(spec.nv), f(spec.nx * spec.nv);
    check(qfh_wigner_nodes(&spec, xb.data(), vb.data()));
    for (double t : tbar) {
      check(qfh_wigner_grid(&spec, t, f.data()));
      char suffix[64];
      std::snprintf(suffix, sizeof suffix, "_t%g.csv", t);
      OutputFile file(common.output == "-" ? "-" : common.output + suffix);
      auto& os = file.out();
      os << cmd.line() << '\n';
      os << "x_bar,v_bar,t_bar,f_bar\n";
      for (std::size_t i = 0; i < spec.nx; ++i)
        for (std::size_t j = 0; j < spec.nv; ++j)
          write_row(os, {num(xb[i]), num(vb[j]), num(t), num(f[i * spec.nv + j])});
      file.commit();
    }
  }
};

// ---- moments --------------------------------------------------------------

struct MomentsDeleter {
  void operator()(qfh_moments* m) const { qfh_moments_destroy(m); }
};

struct MomentsCmd {
  Common common;
  std::string input;
  std::optional<double> mass;
  double decay = 1e-10;
  CLI::App* app = nullptr;

  void attach(CLI::App& parent) {
    app = parent.add_subcommand("moments", "Velocity moments of a tabulated distribution");
    app->add_option("--input", input, "CSV with header v,f or vx,vy,vz,f")->required();
    app->add_option("--mass", mass, "Particle mass (default: parameter m)")->check(CLI::PositiveNumber);
    app->add_option("--decay-threshold", decay, "Allowed boundary |f| relative to max |f|")
        ->check(CLI::PositiveNumber)->capture_default_str();
    common.attach(app, "CSV path or - for stdout");
  }

  void run() {
    const Params p = common.resolve();
    const double m = mass ? *mass : get(p.get(), "m");
    Command cmd("moments");
    cmd.opt("--input", input).opt("--mass", m).opt("--decay-threshold", decay);
    common.record(cmd, p.get());
    {
      std::ifstream probe(input);
      if (!probe) throw Failure{exit_io, "cannot read '" + input + "'"};
    }
    qfh_moments* raw = nullptr;
    check(qfh_moments_from_csv(input.c_str(), m, decay, &raw));
    std::unique_ptr<qfh_moments, MomentsDeleter> mom(raw);
    OutputFile file(common.output);
    auto& os = file.out();
    os << cmd.line() << '\n';
    os << "component,value\n";
    for (std::size_t i = 0; i < qfh_moments_component_count(mom.get()); ++i) {
      const char* name = nullptr;
      double v = 0.0;
      check(qfh_moments_component(mom.get(), i, &name, &v));
      write_row(os, {name, num(v)});
    }
    file.commit();
    if (qfh_moments_boundary_violated(mom.get()))
      std::cerr << "warning: distribution does not decay at the grid boundary (ratio "
                << qfh_moments_boundary_ratio(mom.get()) << ")\n";
  }
};

int run_cli(std::vector<std::string> args, int depth);

struct ReplayCmd {
  std::string file;
  std::string output = "-";
  CLI::App* app = nullptr;

  void attach(CLI::App& parent) {
    app = parent.add_subcommand("replay", "Re-run the command recorded in an output file");
    app->add_option("file", file, "CSV written by qfh")->required();
    app->add_option("-o,--output", output, "Where to write the regenerated output")->capture_default_str();
  }

  int run(int depth) {
    if (depth > 0) throw Failure{exit_config, "replay cannot be nested"};
    std::ifstream in(file);
    if (!in) throw Failure{exit_io, "cannot read '" + file + "'"};
    std::string line;
    std::getline(in, line);
    const std::string tag = "# qfh ";
    if (line.compare(0, tag.size(), tag) != 0)
      throw Failure{exit_config, "'" + file + "' has no recorded qfh command"};
    auto args = split_command(line.substr(tag.size()));
    args.push_back("--output");
    args.push_back(output);
    return run_cli(args, depth + 1);
  }
};

int run_cli(std::vector<std::string> args, int depth) {
  CLI::App app{"Quantum fluid moment hierarchy toolkit"};
  app.name("qfh");
  app.set_version_flag("--version", qfh_version());
  app.set_config("--config", "", "INI/TOML file with option values (flags override it)");
  app.require_subcommand(1);

  DispersionCmd dispersion;
  LinearResponseCmd linear;
  Fluid1DCmd fluid;
  TravelingCmd tw;
  WignerCmd wigner;
  MomentsCmd moments;
  ReplayCmd replay;
  dispersion.attach(app);
  linear.attach(app);
  fluid.attach(app);
  tw.attach(app);
  wigner.attach(app);
  moments.attach(app);
  replay.attach(app);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? exit_ok : exit_config;
  }

  try {
    if (dispersion.app->parsed()) dispersion.run();
    else if (linear.app->parsed()) linear.run();
    else if (fluid.app->parsed()) fluid.run();
    else if (tw.tw->parsed()) tw.run();
    else if (wigner.app->parsed()) wigner.run();
    else if (moments.app->parsed()) moments.run();
    else if (replay.app->parsed()) return replay.run(depth);
  } catch (const Failure& f) {
    std::cerr << "qfh: " << f.message << '\n';
    return f.code;
  }
  return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    return run_cli(std::move(args), 0);
  } catch (const Failure& f) {
    std::cerr << "qfh: " << f.message << '\n';
    return f.code;
  } catch (const std::exception& e) {
    std::cerr << "qfh: " << e.what() << '\n';
    return 1;
  }
}
