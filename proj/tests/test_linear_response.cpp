#include <cmath>
#include <set>
#include <vector>

#include <Eigen/Geometry>

#include "doctest.h"
#include "qfh/dispersion.hpp"
#include "qfh/error.hpp"
#include "qfh/linear_response.hpp"

using namespace qfh;

namespace {

PlasmaParams warm(double T, double hbar) {
  auto p = nondimensional_preset();
  p.T0_par = T;
  p.T0_perp = T;
  p.hbar = hbar;
  return p;
}

// Written out entry by entry for k along z.
double expected_dP(int i, int j, const PerturbationInput& in) {
  const auto& p = in.params;
  const double pre = -p.e * in.delta_phi * in.k * in.k / (p.m * in.omega_sq);
  double v = in.P0(i, j);
  if (j == 2) v += in.P0(i, 2);
  if (i == 2) v += in.P0(j, 2);
  if (i == 2 && j == 2) v += p.n0 * p.hbar * p.hbar * in.k * in.k / (4.0 * p.m);
  return pre * v;
}

}  // namespace

TEST_SUITE("linear_response") {

TEST_CASE("minimal symmetrization enumerates distinct splits") {
  CHECK(minimal_symmetrization_terms(2, 1) == 2);
  CHECK(minimal_symmetrization_terms(3, 1) == 3);
  CHECK(minimal_symmetrization_terms(3, 2) == 3);
  CHECK(minimal_symmetrization_terms(4, 2) == 6);
  CHECK(minimal_symmetrization_terms(3, 4) == 0);

  const int idx[] = {0, 1, 2};
  std::set<std::pair<std::vector<int>, std::vector<int>>> seen;
  const double count = minimal_symmetrization(idx, 2, [&](auto a, auto b) {
    seen.insert({{a.begin(), a.end()}, {b.begin(), b.end()}});
    return 1.0;
  });
  CHECK(count == 3.0);
  CHECK(seen.size() == 3);
  CHECK_THROWS_AS(minimal_symmetrization(idx, 4, [](auto, auto) { return 0.0; }),
                  InvalidArgument);

  // All indices equal: every term coincides, so the 1D coefficient is the term count.
  const int zz[] = {2, 2};
  const int zzz[] = {2, 2, 2};
  const auto one = [](auto, auto) { return 1.0; };
  CHECK(1.0 + minimal_symmetrization(zz, 1, one) == 3.0);
  CHECK(1.0 + minimal_symmetrization(zzz, 1, one) == 4.0);
}

TEST_CASE("pressure response matches the explicit entries") {
  PerturbationInput in;
  in.params = warm(0.2, 0.8);
  in.k = 0.9;
  in.omega_sq = eq14_omega_sq(in.k, in.params);
  in.delta_phi = 1e-3;
  in.P0 << 0.3, 0.05, -0.02,
           0.05, 0.4, 0.07,
           -0.02, 0.07, 0.2;
  const auto dP = delta_P(in);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      CHECK(dP(i, j) == doctest::Approx(expected_dP(i, j, in)).epsilon(1e-14));
  CHECK((dP - dP.transpose()).norm() == 0.0);
}

TEST_CASE("isotropic equilibrium ratios") {
  const auto p = warm(0.25, 0.6);
  PerturbationInput in{0.5, 1.3, 1e-2, anisotropic_dyad(1.0, 0.25, 0.25, p), p};
  const auto dP = delta_P(in);
  const double p0 = p.parallel_pressure();
  CHECK(dP(2, 2) / dP(0, 0) ==
        doctest::Approx(3.0 + p.n0 * 0.36 * 0.25 / (4.0 * p.m * p0)));
  CHECK(dP(0, 0) == doctest::Approx(dP(1, 1)));
  CHECK(dP(0, 1) == 0.0);
  CHECK(dP(0, 2) == 0.0);

  auto classical = in;
  classical.params.hbar = 0.0;
  const auto dc = delta_P(classical);
  CHECK(dc(2, 2) / dc(0, 0) == doctest::Approx(3.0));
}

TEST_CASE("anisotropic dyad") {
  const auto p = warm(0.0, 1.0);
  const auto P = anisotropic_dyad(2.0, 0.1, 0.4, p);
  CHECK(P(0, 0) == doctest::Approx(0.2));
  CHECK(P(1, 1) == doctest::Approx(0.2));
  CHECK(P(2, 2) == doctest::Approx(0.8));
  CHECK(P(0, 1) == 0.0);
  CHECK_THROWS_AS(anisotropic_dyad(1.0, -0.1, 0.1, p), InvalidArgument);
}

TEST_CASE("closed-loop residual vanishes on the hierarchy dispersion branch") {
  for (double T : {0.0, 0.05, 0.5})
    for (double hbar : {0.0, 0.4, 1.2})
      for (double k : {0.1, 0.7, 2.0}) {
        const auto p = warm(T, hbar);
        PerturbationInput in{k, eq14_omega_sq(k, p), 1e-3,
                             anisotropic_dyad(p.n0, 3.0 * T + 0.1, T, p), p};
        CHECK(std::abs(dispersion_residual(in)) < 1e-13);
        in.omega_sq *= 1.01;
        CHECK(std::abs(dispersion_residual(in)) > 1e-3);
      }
  const auto p = warm(0.1, 0.5);
  PerturbationInput bad{0.0, 1.0, 1e-3, anisotropic_dyad(1.0, 0.1, 0.1, p), p};
  CHECK_THROWS_AS(dispersion_residual(bad), InvalidArgument);
}

TEST_CASE("rotated wave vector") {
  const auto p = warm(0.2, 0.7);
  Eigen::Matrix3d P0;
  P0 << 0.3, 0.02, 0.0,
        0.02, 0.25, -0.01,
        0.0, -0.01, 0.2;
  const double w2 = 1.4, dphi = 1e-3;

  // Along z the rotation is the identity.
  const auto direct = delta_P({1.1, w2, dphi, P0, p});
  const auto along_z = delta_P_along(Eigen::Vector3d(0, 0, 1.1), w2, dphi, P0, p);
  CHECK((direct - along_z).norm() < 1e-14);

  // Covariance: rotating P0 and k together rotates δP.
  const Eigen::Matrix3d R =
      Eigen::AngleAxisd(0.7, Eigen::Vector3d(1, 2, -0.5).normalized()).toRotationMatrix();
  const Eigen::Vector3d k = R * Eigen::Vector3d(0, 0, 1.1);
  const auto rotated = delta_P_along(k, w2, dphi, R * P0 * R.transpose(), p);
  CHECK((rotated - R * direct * R.transpose()).norm() < 1e-13);

  const auto Rz = rotation_to_z(k);
  CHECK((Rz * k.normalized() - Eigen::Vector3d::UnitZ()).norm() < 1e-14);
  CHECK_THROWS_AS(rotation_to_z(Eigen::Vector3d::Zero()), InvalidArgument);
}

TEST_CASE("input validation") {
  const auto p = warm(0.1, 0.5);
  PerturbationInput in{0.5, 0.0, 1e-3, anisotropic_dyad(1.0, 0.1, 0.1, p), p};
  CHECK_THROWS_AS(delta_P(in), InvalidArgument);
  in.omega_sq = 1.0;
  in.P0(0, 1) = 0.1;
  CHECK_THROWS_AS(delta_P(in), InvalidArgument);
}

}
