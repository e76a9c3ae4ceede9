#include <limits>
#include <sstream>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "doctest.h"
#include "qfh/error.hpp"
#include "qfh/params.hpp"

using namespace qfh;
using mp = boost::multiprecision::cpp_bin_float_50;

TEST_SUITE("params") {

TEST_CASE("nondimensional preset has unit plasma frequency") {
  const auto p = nondimensional_preset();
  CHECK(p.omega_p() == 1.0);
  CHECK(derived_omega_p(p) == 1.0);
  CHECK(p.hbar == 1.0);
  CHECK(p.T0_par == 0.0);
}

TEST_CASE("SI electron plasma frequency matches an extended-precision evaluation") {
  const auto p = si_electron_preset();
  const mp e("1.602176634e-19"), m("9.1093837015e-31"), eps0("8.8541878128e-12"), n0("1e28");
  const mp wp = sqrt(e * e * n0 / (m * eps0));
  CHECK(p.omega_p() == doctest::Approx(wp.convert_to<double>()).epsilon(1e-15));
}

TEST_CASE("preset names") {
  CHECK(preset("nondim") == nondimensional_preset());
  CHECK(preset("si-electron") == si_electron_preset());
  CHECK_THROWS_AS(preset("cgs"), ConfigError);
}

TEST_CASE("validation") {
  PlasmaParams p;
  p.hbar = 0.0;
  CHECK_NOTHROW(p.validate());
  p.T0_par = -1.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = {};
  p.n0 = 0.0;
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
  p = {};
  p.m = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("set and get by key") {
  PlasmaParams p;
  for (const auto& key : param_keys()) {
    set_param(p, key, 2.5);
    CHECK(get_param(p, key) == 2.5);
  }
  CHECK_THROWS_AS(set_param(p, "Te", 1.0), ConfigError);
  CHECK_THROWS_AS(get_param(p, "Te"), ConfigError);
}

TEST_CASE("key = value files") {
  std::istringstream in(
      "# warm plasma\n"
      "preset = nondim\n"
      "\n"
      "T0_par = 0.25   # parallel\n"
      "hbar=0.5\n");
  const auto p = load_params(in);
  CHECK(p.T0_par == 0.25);
  CHECK(p.hbar == 0.5);
  CHECK(p.n0 == 1.0);

  std::istringstream unknown("Te = 1\n");
  CHECK_THROWS_WITH_AS(load_params(unknown), doctest::Contains("Te"), ConfigError);
  std::istringstream malformed("m = heavy\n");
  CHECK_THROWS_WITH_AS(load_params(malformed), doctest::Contains("line 1"), ConfigError);
  std::istringstream no_equals("hbar 1\n");
  CHECK_THROWS_AS(load_params(no_equals), ConfigError);
  std::istringstream late_preset("hbar = 1\npreset = nondim\n");
  CHECK_THROWS_AS(load_params(late_preset), ConfigError);
  std::istringstream negative("T0_par = -1\n");
  CHECK_THROWS_AS(load_params(negative), InvalidArgument);
  CHECK_THROWS_AS(load_params_file("/nonexistent/params.txt"), IoError);
}

TEST_CASE("config text round trip is exact") {
  auto p = si_electron_preset();
  p.T0_par = 1.0 / 3.0;
  std::istringstream in(to_config_text(p));
  CHECK(load_params(in) == p);
}

TEST_CASE("quantum parameter") {
  auto p = nondimensional_preset();
  p.hbar = 0.7;
  CHECK(quantum_parameter(p, 1.0) == doctest::Approx(0.7));
  CHECK(quantum_parameter(p, -2.0) == doctest::Approx(0.7 / 4.0));
  CHECK_THROWS_AS(quantum_parameter(p, 0.0), InvalidArgument);

  const auto si = si_electron_preset();
  const double u0 = 1.3e6;
  const auto q = with_quantum_parameter(si, u0, 1.0);
  CHECK(quantum_parameter(q, u0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(with_quantum_parameter(si, u0, -1.0), InvalidArgument);

  const auto s = make_nondim(si, u0);
  CHECK(s.time_scale == doctest::Approx(1.0 / si.omega_p()));
  CHECK(s.length_scale == doctest::Approx(u0 / si.omega_p()));
  CHECK(s.H == doctest::Approx(quantum_parameter(si, u0)));
  CHECK_THROWS_AS(make_nondim(si, 0.0), InvalidArgument);
}

}
