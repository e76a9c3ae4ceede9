#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace qfh {

/// Physical constants and equilibrium state of the electron fluid.
///
/// `e` is the charge magnitude (positive). Temperatures are in the same
/// unit system as `kB`; in the nondimensional preset everything is unity
/// except ħ and the temperatures, which stay free.
struct PlasmaParams {
  double n0 = 1.0;
  double m = 1.0;
  double e = 1.0;
  double eps0 = 1.0;
  double hbar = 1.0;
  double T0_par = 0.0;
  double T0_perp = 0.0;
  double kB = 1.0;

  /// Throws InvalidArgument if a field is non-finite, a strictly positive
  /// field is not positive, or a temperature is negative.
  void validate() const;

  double omega_p() const;

  /// Equilibrium parallel pressure n0·kB·T0_par.
  double parallel_pressure() const { return n0 * kB * T0_par; }

  friend bool operator==(const PlasmaParams&, const PlasmaParams&) = default;
};

double derived_omega_p(const PlasmaParams& params);

PlasmaParams nondimensional_preset();

/// CODATA 2018 electron constants, n0 = 1e28 m^-3, zero temperatures.
PlasmaParams si_electron_preset();

/// "nondim" or "si-electron". Throws ConfigError for anything else.
PlasmaParams preset(std::string_view name);

/// Recognized keys, in canonical order.
const std::vector<std::string>& param_keys();

/// Throws ConfigError on an unknown key.
void set_param(PlasmaParams& params, std::string_view key, double value);
double get_param(const PlasmaParams& params, std::string_view key);

/// Reads `key = value` lines on top of `base`. Blank lines and `#`
/// comments are ignored. An optional `preset = <name>` line (must come
/// first) replaces `base`. Unknown keys or malformed values throw
/// ConfigError naming the offending line.
PlasmaParams load_params(std::istream& in, PlasmaParams base = {});
PlasmaParams load_params_file(const std::string& path, PlasmaParams base = {});

/// Inverse of load_params; values printed with 17 significant digits.
std::string to_config_text(const PlasmaParams& params);

/// Characteristic scales for a flow with reference velocity u0.
struct NondimScheme {
  double length_scale = 1.0;    // |u0| / ωp
  double time_scale = 1.0;      // 1 / ωp
  double velocity_scale = 1.0;  // |u0|
  double H = 0.0;               // ħ ωp / (m u0²)
};

/// Throws InvalidArgument for u0 == 0 (the trivial flow is excluded).
NondimScheme make_nondim(const PlasmaParams& params, double u0);

/// ħ ωp / (m u0²), evaluated straight from the constants.
double quantum_parameter(const PlasmaParams& params, double u0);

/// Copy of `params` with ħ chosen so that quantum_parameter(result, u0) == H.
PlasmaParams with_quantum_parameter(PlasmaParams params, double u0, double H);

}  // namespace qfh
