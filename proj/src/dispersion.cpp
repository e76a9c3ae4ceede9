#include "qfh/dispersion.hpp"

#include <cmath>
#include <string>

#include "qfh/error.hpp"

namespace qfh {

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::eq14: return "eq14";
    case Relation::quantum_langmuir: return "quantum_langmuir";
    case Relation::bohm_gross: return "bohm_gross";
    case Relation::adiabatic_gamma: return "adiabatic_gamma";
    case Relation::temperature_closure: return "temperature_closure";
  }
  return "unknown";
}

Relation relation_from_string(std::string_view tag) {
  for (Relation r : all_relations)
    if (to_string(r) == tag) return r;
  throw ConfigError("unknown dispersion relation '" + std::string(tag) + "'");
}

DispersionScales dispersion_scales(double k, const PlasmaParams& params) {
  const double wp = params.omega_p();
  const double kw = k / wp;
  const double q = params.hbar * k * k / (params.m * wp);
  return {12.0 * params.kB * params.T0_par / params.m * kw * kw, q * q};
}

double eq14_omega_sq(double k, const PlasmaParams& params) {
  const auto [tau, eta] = dispersion_scales(k, params);
  const double wp = params.omega_p();
  return 0.5 * wp * wp * (1.0 + std::sqrt(1.0 + tau + eta));
}

double eq14_excess(double k, const PlasmaParams& params) {
  const auto [tau, eta] = dispersion_scales(k, params);
  const double wp = params.omega_p();
  const double s = tau + eta;
  return 0.5 * wp * wp * s / (std::sqrt(1.0 + s) + 1.0);
}

double eq14_growing_branch_omega_sq(double k, const PlasmaParams& params) {
  return -eq14_excess(k, params);
}

double quantum_langmuir_omega_sq(double k, const PlasmaParams& params) {
  const double wp = params.omega_p();
  const double q = params.hbar * k * k / params.m;
  return wp * wp + 3.0 * params.kB * params.T0_par / params.m * k * k + 0.25 * q * q;
}

double bohm_gross_omega_sq(double k, const PlasmaParams& params) {
  return adiabatic_gamma_omega_sq(k, params, 3.0);
}

double adiabatic_gamma_omega_sq(double k, const PlasmaParams& params, double gamma) {
  if (!(gamma > 0.0)) throw InvalidArgument("adiabatic exponent gamma must be > 0");
  const double wp = params.omega_p();
  return wp * wp + gamma * (params.kB * params.T0_par / params.m) * k * k;
}

double temperature_closure_omega_sq(double k, const PlasmaParams& params) {
  const double wp = params.omega_p();
  const double q = params.hbar * k * k / params.m;
  return wp * wp + (5.0 / 3.0) * (params.kB * params.T0_par / params.m) * k * k +
         q * q / 12.0;
}

double omega_sq(Relation r, double k, const PlasmaParams& params, double gamma) {
  switch (r) {
    case Relation::eq14: return eq14_omega_sq(k, params);
    case Relation::quantum_langmuir: return quantum_langmuir_omega_sq(k, params);
    case Relation::bohm_gross: return bohm_gross_omega_sq(k, params);
    case Relation::adiabatic_gamma: return adiabatic_gamma_omega_sq(k, params, gamma);
    case Relation::temperature_closure: return temperature_closure_omega_sq(k, params);
  }
  throw InvalidArgument("unknown relation");
}

std::vector<DispersionPoint> sweep(Relation r, double k_min, double k_max,
                                   int n_points, const PlasmaParams& params,
                                   Spacing spacing, double gamma) {
  params.validate();
  if (!(k_min >= 0.0) || !(k_max > k_min) || !std::isfinite(k_max))
    throw InvalidArgument("sweep needs 0 <= k_min < k_max");
  if (n_points < 2) throw InvalidArgument("sweep needs at least 2 points");
  if (spacing == Spacing::log && k_min <= 0.0)
    throw InvalidArgument("log-spaced sweep needs k_min > 0");
  if (r == Relation::adiabatic_gamma && !(gamma > 0.0))
    throw InvalidArgument("adiabatic exponent gamma must be > 0");

  std::vector<DispersionPoint> out;
  out.reserve(static_cast<std::size_t>(n_points));
  const double last = static_cast<double>(n_points - 1);
  for (int i = 0; i < n_points; ++i) {
    const double f = static_cast<double>(i) / last;
    double k = 0.0;
    if (i == 0) k = k_min;
    else if (i == n_points - 1) k = k_max;
    else if (spacing == Spacing::uniform) k = k_min + (k_max - k_min) * f;
    else k = k_min * std::pow(k_max / k_min, f);
    out.push_back({k, omega_sq(r, k, params, gamma), r, params});
  }
  return out;
}

}  // namespace qfh
