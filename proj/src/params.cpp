#include "qfh/params.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "qfh/error.hpp"

namespace qfh {

namespace {

double* field(PlasmaParams& p, std::string_view key) {
  if (key == "n0") return &p.n0;
  if (key == "m") return &p.m;
  if (key == "e") return &p.e;
  if (key == "eps0") return &p.eps0;
  if (key == "hbar") return &p.hbar;
  if (key == "T0_par") return &p.T0_par;
  if (key == "T0_perp") return &p.T0_perp;
  if (key == "kB") return &p.kB;
  return nullptr;
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

double parse_double(std::string_view text, const std::string& context) {
  // strtod accepts forms from_chars on older libstdc++ rejects ("1e+28").
  std::string owned(text);
  char* end = nullptr;
  const double v = std::strtod(owned.c_str(), &end);
  if (owned.empty() || end != owned.c_str() + owned.size() || !std::isfinite(v))
    throw ConfigError(context + ": '" + owned + "' is not a finite number");
  return v;
}

void require_positive(double v, const char* name) {
  if (!(std::isfinite(v) && v > 0.0))
    throw InvalidArgument(std::string("parameter ") + name +
                          " must be finite and > 0");
}

void require_non_negative(double v, const char* name) {
  if (!(std::isfinite(v) && v >= 0.0))
    throw InvalidArgument(std::string("parameter ") + name +
                          " must be finite and >= 0");
}

}  // namespace

void PlasmaParams::validate() const {
  require_positive(n0, "n0");
  require_positive(m, "m");
  require_positive(e, "e");
  require_positive(eps0, "eps0");
  require_non_negative(hbar, "hbar");
  require_non_negative(T0_par, "T0_par");
  require_non_negative(T0_perp, "T0_perp");
  require_positive(kB, "kB");
  const double wp = omega_p();
  if (!(std::isfinite(wp) && wp > 0.0))
    throw InvalidArgument("plasma frequency is not finite and positive");
}

double PlasmaParams::omega_p() const {
  // e·sqrt(n0/(m·eps0)) keeps SI magnitudes away from underflow.
  return e * std::sqrt(n0 / (m * eps0));
}

double derived_omega_p(const PlasmaParams& params) {
  params.validate();
  return params.omega_p();
}

PlasmaParams nondimensional_preset() { return PlasmaParams{}; }

PlasmaParams si_electron_preset() {
  PlasmaParams p;
  p.n0 = 1e28;
  p.m = 9.1093837015e-31;
  p.e = 1.602176634e-19;
  p.eps0 = 8.8541878128e-12;
  p.hbar = 1.054571817e-34;
  p.kB = 1.380649e-23;
  p.T0_par = 0.0;
  p.T0_perp = 0.0;
  return p;
}

PlasmaParams preset(std::string_view name) {
  if (name == "nondim" || name == "nondimensional") return nondimensional_preset();
  if (name == "si-electron" || name == "si_electron") return si_electron_preset();
  throw ConfigError("unknown preset '" + std::string(name) +
                    "' (expected nondim or si-electron)");
}

const std::vector<std::string>& param_keys() {
  static const std::vector<std::string> keys{"n0",     "m",       "e",
                                             "eps0",   "hbar",    "T0_par",
                                             "T0_perp", "kB"};
  return keys;
}

void set_param(PlasmaParams& params, std::string_view key, double value) {
  double* slot = field(params, key);
  if (!slot) throw ConfigError("unknown parameter key '" + std::string(key) + "'");
  *slot = value;
}

double get_param(const PlasmaParams& params, std::string_view key) {
  PlasmaParams copy = params;
  const double* slot = field(copy, key);
  if (!slot) throw ConfigError("unknown parameter key '" + std::string(key) + "'");
  return *slot;
}

PlasmaParams load_params(std::istream& in, PlasmaParams base) {
  std::string line;
  int lineno = 0;
  bool seen_value = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = line;
    if (auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
    sv = trim(sv);
    if (sv.empty()) continue;
    const auto eq = sv.find('=');
    const std::string where = "line " + std::to_string(lineno);
    if (eq == std::string_view::npos)
      throw ConfigError(where + ": expected key = value");
    const auto key = trim(sv.substr(0, eq));
    const auto value = trim(sv.substr(eq + 1));
    if (key == "preset") {
      if (seen_value)
        throw ConfigError(where + ": 'preset' must precede parameter values");
      base = preset(value);
      continue;
    }
    if (!field(base, key))
      throw ConfigError(where + ": unknown parameter key '" + std::string(key) + "'");
    set_param(base, key, parse_double(value, where + " (" + std::string(key) + ")"));
    seen_value = true;
  }
  base.validate();
  return base;
}

PlasmaParams load_params_file(const std::string& path, PlasmaParams base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open parameter file '" + path + "'");
  return load_params(in, base);
}

std::string to_config_text(const PlasmaParams& params) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (const auto& key : param_keys()) os << key << " = " << get_param(params, key) << '\n';
  return os.str();
}

NondimScheme make_nondim(const PlasmaParams& params, double u0) {
  params.validate();
  if (u0 == 0.0 || !std::isfinite(u0))
    throw InvalidArgument("reference velocity u0 must be finite and nonzero");
  const double wp = params.omega_p();
  NondimScheme s;
  s.time_scale = 1.0 / wp;
  s.velocity_scale = std::abs(u0);
  s.length_scale = s.velocity_scale * s.time_scale;
  s.H = params.hbar * wp / (params.m * u0 * u0);
  return s;
}

double quantum_parameter(const PlasmaParams& params, double u0) {
  if (u0 == 0.0) throw InvalidArgument("reference velocity u0 must be nonzero");
  const double wp = std::sqrt(params.e * params.e * params.n0 / (params.m * params.eps0));
  return params.hbar * wp / (params.m * u0 * u0);
}

PlasmaParams with_quantum_parameter(PlasmaParams params, double u0, double H) {
  if (u0 == 0.0) throw InvalidArgument("reference velocity u0 must be nonzero");
  if (!(H >= 0.0)) throw InvalidArgument("quantum parameter H must be >= 0");
  params.hbar = H * params.m * u0 * u0 / params.omega_p();
  return params;
}

}  // namespace qfh
