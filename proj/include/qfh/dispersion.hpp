#pragma once

#include <string_view>
#include <vector>

#include "qfh/params.hpp"

namespace qfh {

/// Linear Langmuir-wave dispersion relations. All return ω², the caller
/// takes the positive root. T0 in the limit relations is T0_par.
enum class Relation {
  eq14,                 // third-order hierarchy, fourth moment dropped
  quantum_langmuir,     // ωp² + 3kBT k²/m + ħ²k⁴/(4m²)
  bohm_gross,           // ωp² + 3kBT k²/m
  adiabatic_gamma,      // ωp² + γ kBT k²/m
  temperature_closure,  // ωp² + (5/3)kBT k²/m + ħ²k⁴/(12m²)
};

inline constexpr Relation all_relations[] = {
    Relation::eq14, Relation::quantum_langmuir, Relation::bohm_gross,
    Relation::adiabatic_gamma, Relation::temperature_closure};

std::string_view to_string(Relation r);
/// Throws ConfigError for an unknown tag.
Relation relation_from_string(std::string_view tag);

struct DispersionPoint {
  double k = 0.0;
  double omega_sq = 0.0;
  Relation relation = Relation::eq14;
  PlasmaParams params;
};

/// Thermal and quantum strengths of mode k in units of ωp:
///   tau = 12 kB T0_par k² / (m ωp²),  eta = ħ² k⁴ / (m² ωp²).
struct DispersionScales {
  double tau = 0.0;
  double eta = 0.0;
};
DispersionScales dispersion_scales(double k, const PlasmaParams& params);

/// (ωp²/2)·[1 + sqrt(1 + tau + eta)]. Independent of T0_perp.
double eq14_omega_sq(double k, const PlasmaParams& params);

/// eq14_omega_sq − ωp², evaluated without cancellation at small k.
double eq14_excess(double k, const PlasmaParams& params);

/// ωp²/2·[1 − sqrt(1 + tau + eta)]: the second root of the same quartic.
/// Negative for every k ≠ 0 with tau + eta > 0, i.e. a purely growing mode.
double eq14_growing_branch_omega_sq(double k, const PlasmaParams& params);

double quantum_langmuir_omega_sq(double k, const PlasmaParams& params);
double bohm_gross_omega_sq(double k, const PlasmaParams& params);
/// Throws InvalidArgument unless gamma > 0.
double adiabatic_gamma_omega_sq(double k, const PlasmaParams& params, double gamma);
double temperature_closure_omega_sq(double k, const PlasmaParams& params);

inline constexpr double default_gamma = 5.0 / 3.0;

double omega_sq(Relation r, double k, const PlasmaParams& params,
                double gamma = default_gamma);

enum class Spacing { uniform, log };

/// Evaluates `r` on n_points wavenumbers in [k_min, k_max]. Throws
/// InvalidArgument for k_min < 0, k_max <= k_min, n_points < 2, or a log
/// sweep starting at k_min = 0.
std::vector<DispersionPoint> sweep(Relation r, double k_min, double k_max,
                                   int n_points, const PlasmaParams& params,
                                   Spacing spacing = Spacing::uniform,
                                   double gamma = default_gamma);

}  // namespace qfh
