#pragma once

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "qfh/params.hpp"

namespace qfh {

/// Minimal symmetrization over a group of free indices.
///
/// A bracketed product such as P_{k(i} ∂^k u_{j)} or Q_{l(ij} ∂^l u_{k)}
/// distributes its free indices between two factors. The minimal sum
/// keeps one term per distinct choice of which free indices go to the
/// first factor (order inside a factor is irrelevant because the moment
/// tensors are symmetric), giving C(n, r) terms for n free indices of
/// which r sit on the first factor.
///
/// `term(first, second)` receives the index values routed to each factor.
double minimal_symmetrization(
    std::span<const int> free_indices, int first_count,
    const std::function<double(std::span<const int>, std::span<const int>)>& term);

/// Number of terms the minimal sum produces: C(n, r).
int minimal_symmetrization_terms(int free_count, int first_count);

struct PerturbationInput {
  double k = 0.0;          // along z
  double omega_sq = 0.0;
  double delta_phi = 0.0;  // potential amplitude (absorbs the expansion parameter)
  Eigen::Matrix3d P0 = Eigen::Matrix3d::Zero();
  PlasmaParams params;
};

/// First-order pressure-dyad perturbation for propagation along z:
///   δP_ij = −(e δφ k²/(m ω²)) · (P0_ij + P0_(iz δ_j)z + n0 ħ² k² δ_iz δ_jz / (4m)).
/// Throws InvalidArgument for omega_sq <= 0 or a non-symmetric P0.
Eigen::Matrix3d delta_P(const PerturbationInput& input);

/// Same response for a wave vector of arbitrary direction: P0 is rotated
/// into the frame where k is along z, and the result rotated back.
Eigen::Matrix3d delta_P_along(const Eigen::Vector3d& k_vec, double omega_sq,
                              double delta_phi, const Eigen::Matrix3d& P0,
                              const PlasmaParams& params);

/// Rotation R with R·k̂ = ẑ.
Eigen::Matrix3d rotation_to_z(const Eigen::Vector3d& k_vec);

/// n kB diag(T_perp, T_perp, T_par).
Eigen::Matrix3d anisotropic_dyad(double n, double T_perp, double T_par,
                                 const PlasmaParams& params);

/// Closed-loop residual of the linear Langmuir response at (k, ω²).
///
/// Feeds δP_zz into the linearized momentum balance, continuity and
/// Poisson equations and returns the Poisson mismatch
///   (k² δφ + (e/ε0) δn) / (k² δφ),
/// which vanishes exactly when ω² solves the hierarchy's dispersion
/// relation.
double dispersion_residual(const PerturbationInput& input);

}  // namespace qfh
