#include <cmath>
#include <iomanip>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "qfh/error.hpp"
#include "qfh/moments.hpp"

using namespace qfh;

namespace {

// ∫ v^j exp(−v²) dv
double gauss_moment(int j) {
  if (j % 2 == 1) return 0.0;
  return std::tgamma(0.5 * j + 0.5);
}

// Central moment of order r for f = (1 + a v³) exp(−v²), via raw moments and
// the binomial expansion around u.
double skewed_central(int r, double a, double u) {
  double s = 0.0;
  for (int j = 0; j <= r; ++j) {
    const double raw = gauss_moment(j) + a * gauss_moment(j + 3);
    s += std::tgamma(r + 1.0) / (std::tgamma(j + 1.0) * std::tgamma(r - j + 1.0)) *
         std::pow(-u, r - j) * raw;
  }
  return s;
}

std::vector<double> tabulate_1d(const Axis& ax, double a) {
  std::vector<double> f(ax.size());
  for (std::size_t i = 0; i < ax.size(); ++i) {
    const double v = ax.nodes[i];
    f[i] = (1.0 + a * v * v * v) * std::exp(-v * v);
  }
  return f;
}

}  // namespace

TEST_SUITE("moments") {

TEST_CASE("axis rules") {
  const auto u = Axis::uniform(-1.0, 1.0, 5);
  CHECK(u.nodes[2] == 0.0);
  CHECK(u.weights[0] == doctest::Approx(0.25));
  CHECK(u.weights[1] == doctest::Approx(0.5));
  const auto gh = Axis::gauss_hermite(12, 1.0, 2.0);
  double w = 0.0;
  for (std::size_t i = 0; i < gh.size(); ++i)
    w += gh.weights[i] * std::exp(-std::pow((gh.nodes[i] - 1.0) / 2.0, 2));
  CHECK(w == doctest::Approx(2.0 * std::sqrt(M_PI)).epsilon(1e-13));
  CHECK_THROWS_AS(Axis::uniform(1.0, 0.0, 10), InvalidArgument);
  CHECK_THROWS_AS(Axis::from_nodes({0.0, 0.0, 1.0}), InvalidArgument);
  CHECK_THROWS_AS(Axis::gauss_hermite(10, 0.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(VelocityGrid({Axis::uniform(0.0, 1.0, 4)}), InvalidArgument);
  CHECK_THROWS_AS(VelocityGrid({u, u}), InvalidArgument);
}

TEST_CASE("skewed 1D distribution against Gamma-function moments") {
  const double a = 0.3;
  const double n = std::sqrt(M_PI);
  const double u = a * gauss_moment(4) / n;
  const double mass = 2.0;
  for (const auto& ax : {Axis::gauss_hermite(20, 0.0, 1.0), Axis::uniform(-10.0, 10.0, 801)}) {
    const VelocityGrid grid({ax});
    const auto m = compute_moments(tabulate_1d(ax, a), grid, {mass, 1e-10});
    CHECK(m.dim == 1);
    CHECK(m.n == doctest::Approx(n).epsilon(1e-13));
    CHECK(m.u[0] == doctest::Approx(u).epsilon(1e-13));
    CHECK(m.P(0, 0) == doctest::Approx(mass * skewed_central(2, a, u)).epsilon(1e-12));
    CHECK(m.Q(0, 0, 0) == doctest::Approx(mass * skewed_central(3, a, u)).epsilon(1e-12));
    CHECK(m.R(0, 0, 0, 0) == doctest::Approx(mass * skewed_central(4, a, u)).epsilon(1e-12));
    CHECK(m.p == m.P(0, 0));
    CHECK(m.q[0] == doctest::Approx(0.5 * m.Q(0, 0, 0)));
    CHECK_FALSE(m.boundary_decay_violated);
  }
}

TEST_CASE("drifting anisotropic Maxwellian in 3D") {
  const double a = 0.5, b = 2.0, w = 0.7, mass = 3.0;
  const VelocityGrid grid({Axis::gauss_hermite(10, 0.0, std::sqrt(a)),
                           Axis::gauss_hermite(10, 0.0, std::sqrt(a)),
                           Axis::gauss_hermite(10, w, std::sqrt(b))});
  std::vector<double> f(grid.size());
  std::size_t idx[3];
  for (std::size_t k = 0; k < f.size(); ++k) {
    grid.unflatten(k, idx);
    const double vx = grid.axis(0).nodes[idx[0]], vy = grid.axis(1).nodes[idx[1]],
                 vz = grid.axis(2).nodes[idx[2]];
    f[k] = std::exp(-vx * vx / a - vy * vy / a - (vz - w) * (vz - w) / b);
  }
  const auto m = compute_moments(f, grid, {mass, 1e-10});
  const double n = std::pow(M_PI, 1.5) * a * std::sqrt(b);
  CHECK(m.n == doctest::Approx(n).epsilon(1e-13));
  CHECK(std::abs(m.u[0]) < 1e-14);
  CHECK(m.u[2] == doctest::Approx(w).epsilon(1e-13));
  CHECK(m.P(0, 0) == doctest::Approx(mass * n * a / 2.0).epsilon(1e-12));
  CHECK(m.P(2, 2) == doctest::Approx(mass * n * b / 2.0).epsilon(1e-12));
  CHECK(std::abs(m.P(0, 2)) < 1e-12);
  CHECK(std::abs(m.Q(2, 2, 2)) < 1e-11);
  CHECK(m.R(2, 2, 2, 2) == doctest::Approx(mass * n * 0.75 * b * b).epsilon(1e-12));
  CHECK(m.R(0, 2, 0, 2) == doctest::Approx(mass * n * a * b / 4.0).epsilon(1e-12));
  CHECK(m.R(0, 0, 2, 2) == m.R(2, 0, 2, 0));
  CHECK(m.p == doctest::Approx(mass * n * (a + a + b) / 6.0).epsilon(1e-12));

  const auto comps = moment_components(m);
  // n, 3 u, 6 P, 10 Q, 15 R, p, 3 q
  CHECK(comps.size() == 1 + 3 + 6 + 10 + 15 + 1 + 3);
  CHECK(comps.front().first == "n");
  CHECK(comps[4].first == "P_xx");
}

TEST_CASE("symmetric distribution has vanishing odd moments") {
  const auto ax = Axis::uniform(-6.0, 6.0, 121);
  const VelocityGrid grid({ax});
  std::vector<double> f(ax.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(-ax.nodes[i] * ax.nodes[i]);
  const auto m = compute_moments(f, grid);
  CHECK(std::abs(m.u[0]) < 1e-16);
  CHECK(std::abs(m.Q(0, 0, 0)) < 1e-16);
}

TEST_CASE("boundary decay flag and invalid densities") {
  const auto ax = Axis::uniform(-1.0, 1.0, 21);
  const VelocityGrid grid({ax});
  std::vector<double> flat(ax.size(), 1.0);
  const auto m = compute_moments(flat, grid);
  CHECK(m.boundary_decay_violated);
  CHECK(m.boundary_ratio == 1.0);

  std::vector<double> neg(ax.size(), -1.0);
  CHECK_THROWS_AS(compute_moments(neg, grid), NumericalError);
  std::vector<double> odd(ax.size());
  for (std::size_t i = 0; i < odd.size(); ++i) odd[i] = ax.nodes[i];
  CHECK_THROWS_AS(compute_moments(odd, grid), NumericalError);
  CHECK_THROWS_AS(compute_moments(std::vector<double>(5, 1.0), grid), InvalidArgument);
  flat[3] = NAN;
  CHECK_THROWS_AS(compute_moments(flat, grid), NumericalError);
}

TEST_CASE("distribution CSV") {
  std::ostringstream csv;
  csv << "v,f\n" << std::setprecision(17);
  for (int i = 20; i >= -20; --i) {
    const double v = 0.25 * i;
    csv << v << ',' << std::exp(-v * v) << '\n';
  }
  std::istringstream in(csv.str());
  const auto t = load_distribution_csv(in);
  CHECK(t.grid.dim() == 1);
  CHECK(t.grid.axis(0).nodes.front() == -5.0);
  CHECK(t.f.front() == doctest::Approx(std::exp(-25.0)));
  const auto m = compute_moments(t.f, t.grid);
  CHECK(m.n == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-9));

  std::istringstream header("u,f\n0,1\n");
  CHECK_THROWS_AS(load_distribution_csv(header), ConfigError);
  std::istringstream bad_number("v,f\n0,x\n");
  CHECK_THROWS_AS(load_distribution_csv(bad_number), ConfigError);
  std::string rep = "v,f\n";
  for (int i = 0; i < 8; ++i) rep += std::to_string(i) + ",1\n";
  rep += "3,2\n";
  std::istringstream repeated(rep);
  CHECK_THROWS_AS(load_distribution_csv(repeated), ConfigError);
  std::string diag = "vx,vy,vz,f\n";
  for (int i = 0; i < 8; ++i) diag += std::to_string(i) + ',' + std::to_string(i) + ',' + std::to_string(i) + ",1\n";
  std::istringstream holes(diag);
  CHECK_THROWS_AS(load_distribution_csv(holes), ConfigError);
  CHECK_THROWS_AS(load_distribution_csv_file("/nonexistent/f.csv"), IoError);
}

TEST_CASE("output formats") {
  const auto ax = Axis::gauss_hermite(16, 0.0, 1.0);
  const auto m = compute_moments(tabulate_1d(ax, 0.0), VelocityGrid({ax}));
  std::ostringstream out;
  write_moments_csv(out, m);
  const std::string s = out.str();
  CHECK(s.rfind("component,value\nn,", 0) == 0);
  CHECK(s.find("R_xxxx,") != std::string::npos);
  const std::string j = moments_to_json(m);
  CHECK(j.find("\"boundary_decay_violated\": ") != std::string::npos);
  CHECK(j.find("\"R_xxxx\": ") != std::string::npos);
}

}
