#include <catch2/catch.hpp>

#include <cmath>

#include "lbb/model.hpp"
#include "lbb/rng.hpp"

using namespace lbb;

TEST_CASE("db_to_linear basics", "[model]") {
  CHECK(db_to_linear(0.0) == Approx(1.0).margin(1e-15));
  CHECK(db_to_linear(10.0) == Approx(10.0).margin(1e-12));
  // 10^0.5, stated to six significant digits
  CHECK(db_to_linear(5.0) == Approx(std::pow(10.0, 0.5)).margin(1e-12));
  CHECK(db_to_linear(5.0) == Approx(3.16228).margin(5e-6));
  CHECK_THROWS_AS(db_to_linear(std::numeric_limits<double>::infinity()), std::domain_error);
  CHECK_THROWS_AS(db_to_linear(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
}

TEST_CASE("db_to_linear is increasing and multiplicative", "[model][property]") {
  SplitMix64 rng(12345);
  for (int i = 0; i < 1000; ++i) {
    const double a = (uniform_unit(rng) - 0.5) * 80.0;
    const double b = (uniform_unit(rng) - 0.5) * 80.0;
    CHECK(db_to_linear(a + b) ==
          Approx(db_to_linear(a) * db_to_linear(b)).epsilon(1e-12));
    if (a < b) CHECK(db_to_linear(a) < db_to_linear(b));
  }
}

TEST_CASE("mean_snr_from_geometry", "[model]") {
  LinkBudget unit{1.0, 4.0, 1.0, 1.0};
  CHECK(mean_snr_from_geometry(unit, 1.0, Receiver::bob) == Approx(1.0));
  CHECK(mean_snr_from_geometry(unit, 2.0, Receiver::bob) == Approx(0.0625));
  LinkBudget budget{10.0, 2.0, 1.0, 0.1};
  CHECK(mean_snr_from_geometry(budget, 10.0, Receiver::eve) == Approx(1.0));
  CHECK_THROWS_AS(mean_snr_from_geometry(unit, 0.0, Receiver::bob), std::domain_error);
  CHECK_THROWS_AS(mean_snr_from_geometry(unit, -3.0, Receiver::eve), std::domain_error);
}

TEST_CASE("mean_snr_from_geometry decreases with distance", "[model][property]") {
  LinkBudget budget{2.5, 3.0, 0.4, 0.7};
  SplitMix64 rng(99);
  for (int i = 0; i < 200; ++i) {
    const double d1 = 1.0 + uniform_unit(rng) * 5000.0;
    const double d2 = d1 * (1.0 + uniform_unit(rng));
    CHECK(mean_snr_from_geometry(budget, d1, Receiver::bob) >
          mean_snr_from_geometry(budget, d2, Receiver::bob));
  }
}

TEST_CASE("polar and cartesian conversions", "[model]") {
  const CartesianPosition axis = polar_to_cartesian({1.0, 0.0});
  CHECK(axis.x == Approx(1.0));
  CHECK(axis.y == Approx(0.0).margin(1e-15));

  const CartesianPosition diag = polar_to_cartesian({std::sqrt(2.0), pi / 4.0});
  CHECK(diag.x == Approx(1.0).epsilon(1e-12));
  CHECK(diag.y == Approx(1.0).epsilon(1e-12));

  // a 1 km south-east position: range 1414.21 m, bearing -pi/4 wrapped
  const PolarPosition se = cartesian_to_polar({1000.0, -1000.0});
  CHECK(se.distance == Approx(1414.2135623730951).epsilon(1e-12));
  CHECK(se.distance == Approx(1414.21).margin(5e-3));
  CHECK(se.angle == Approx(7.0 * pi / 4.0).epsilon(1e-12));

  CHECK_THROWS_AS(cartesian_to_polar({0.0, 0.0}), std::domain_error);
}

TEST_CASE("polar round trip is the identity", "[model][property]") {
  SplitMix64 rng(2024);
  for (int i = 0; i < 1000; ++i) {
    const double d = 1e-3 + uniform_unit(rng) * 5000.0;
    const double ang = uniform_unit(rng) * two_pi;
    const PolarPosition back = cartesian_to_polar(polar_to_cartesian({d, ang}));
    CHECK(back.distance == Approx(d).epsilon(1e-12));
    // compare directions through the unwrapped difference
    const double diff = std::abs(normalize_angle(back.angle - ang));
    CHECK(std::min(diff, two_pi - diff) < 1e-12);
  }
}

TEST_CASE("make_polar normalizes and validates", "[model]") {
  CHECK(make_polar(1.0, -pi / 2.0).angle == Approx(3.0 * pi / 2.0));
  CHECK(make_polar(0.0, 10.0).angle >= 0.0);
  CHECK(make_polar(0.0, 10.0).angle < two_pi);
  CHECK_THROWS_AS(make_polar(-1.0, 0.0), std::domain_error);
}

TEST_CASE("scenario validation", "[model]") {
  Scenario sc;
  CHECK_NOTHROW(validate_scenario(sc));
  Scenario bad = sc;
  bad.n_alice = 1;  // the beamformer family needs a 2-D plane
  CHECK_THROWS_AS(validate_scenario(bad), std::domain_error);
  bad = sc;
  bad.n_eve = 0;
  CHECK_THROWS_AS(validate_scenario(bad), std::domain_error);
  bad = sc;
  bad.mean_snr_bob = 0.0;
  CHECK_THROWS_AS(validate_scenario(bad), std::domain_error);
  bad = sc;
  bad.k_eve = -0.5;
  CHECK_THROWS_AS(validate_scenario(bad), std::domain_error);
  bad = sc;
  bad.secrecy_rate = -1.0;
  CHECK_THROWS_AS(validate_scenario(bad), std::domain_error);
}
