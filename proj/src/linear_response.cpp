#include "qfh/linear_response.hpp"

#include <cmath>

#include <Eigen/Geometry>

#include "qfh/error.hpp"

namespace qfh {

namespace {
constexpr int z_axis = 2;

double kronecker(int a, int b) { return a == b ? 1.0 : 0.0; }
}  // namespace

int minimal_symmetrization_terms(int free_count, int first_count) {
  if (first_count < 0 || first_count > free_count) return 0;
  long c = 1;
  for (int i = 1; i <= first_count; ++i) c = c * (free_count - first_count + i) / i;
  return static_cast<int>(c);
}

double minimal_symmetrization(
    std::span<const int> free_indices, int first_count,
    const std::function<double(std::span<const int>, std::span<const int>)>& term) {
  const int n = static_cast<int>(free_indices.size());
  if (first_count < 0 || first_count > n)
    throw InvalidArgument("symmetrization split exceeds the number of free indices");
  std::vector<int> first, second;
  double sum = 0.0;
  // Enumerate position subsets as bitmasks in increasing order.
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != first_count) continue;
    first.clear();
    second.clear();
    for (int p = 0; p < n; ++p)
      ((mask >> p) & 1u ? first : second).push_back(free_indices[static_cast<std::size_t>(p)]);
    sum += term(first, second);
  }
  return sum;
}

Eigen::Matrix3d delta_P(const PerturbationInput& in) {
  in.params.validate();
  if (!(in.omega_sq > 0.0) || !std::isfinite(in.omega_sq))
    throw InvalidArgument("linear response needs omega_sq > 0");
  if (!in.P0.allFinite() || !(in.P0 - in.P0.transpose()).isZero(0.0))
    throw InvalidArgument("equilibrium pressure tensor must be finite and symmetric");

  const auto& p = in.params;
  const double prefactor = -p.e * in.delta_phi * in.k * in.k / (p.m * in.omega_sq);
  const double quantum = p.n0 * p.hbar * p.hbar * in.k * in.k / (4.0 * p.m);

  Eigen::Matrix3d out;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      const int free[] = {i, j};
      const double bracket = minimal_symmetrization(
          free, 1, [&](std::span<const int> a, std::span<const int> b) {
            return in.P0(a[0], z_axis) * kronecker(b[0], z_axis);
          });
      const double v = prefactor * (in.P0(i, j) + bracket +
                                    quantum * kronecker(i, z_axis) * kronecker(j, z_axis));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Eigen::Matrix3d rotation_to_z(const Eigen::Vector3d& k_vec) {
  const double norm = k_vec.norm();
  if (!(norm > 0.0) || !std::isfinite(norm))
    throw InvalidArgument("wave vector must be finite and nonzero");
  return Eigen::Quaterniond::FromTwoVectors(k_vec / norm, Eigen::Vector3d::UnitZ())
      .toRotationMatrix();
}

Eigen::Matrix3d delta_P_along(const Eigen::Vector3d& k_vec, double omega_sq,
                              double delta_phi, const Eigen::Matrix3d& P0,
                              const PlasmaParams& params) {
  const Eigen::Matrix3d R = rotation_to_z(k_vec);
  Eigen::Matrix3d P0_rot = R * P0 * R.transpose();
  P0_rot = 0.5 * (P0_rot + P0_rot.transpose()).eval();
  PerturbationInput in{k_vec.norm(), omega_sq, delta_phi, P0_rot, params};
  Eigen::Matrix3d out = R.transpose() * delta_P(in) * R;
  return 0.5 * (out + out.transpose());
}

Eigen::Matrix3d anisotropic_dyad(double n, double T_perp, double T_par,
                                 const PlasmaParams& params) {
  if (!(n >= 0.0) || !(T_perp >= 0.0) || !(T_par >= 0.0))
    throw InvalidArgument("density and temperatures must be non-negative");
  return n * params.kB * Eigen::Vector3d(T_perp, T_perp, T_par).asDiagonal().toDenseMatrix();
}

double dispersion_residual(const PerturbationInput& in) {
  if (in.k == 0.0 || in.delta_phi == 0.0)
    throw InvalidArgument("dispersion residual needs k != 0 and delta_phi != 0");
  const auto& p = in.params;
  const double dPzz = delta_P(in)(z_axis, z_axis);
  // ω δu_z = k δP_zz/(m n0) − (e/m) k δφ ;  ω δn = k n0 δu_z
  const double dn = in.k * in.k * p.n0 / in.omega_sq *
                    (dPzz / (p.m * p.n0) - p.e * in.delta_phi / p.m);
  const double k2phi = in.k * in.k * in.delta_phi;
  return (k2phi + p.e / p.eps0 * dn) / k2phi;
}

}  // namespace qfh
