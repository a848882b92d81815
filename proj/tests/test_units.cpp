#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qchain/units.hpp"

using namespace qchain;

TEST_CASE("device parameters map to the dimensionless set") {
    // k_B * 10 mK / (h * 5 GHz)
    const auto d = to_dimensionless(PhysicalParams{5e9, 0.01, 1e3});
    CHECK(d.temperature == doctest::Approx(0.0416733).epsilon(1e-5));
    CHECK(d.temperature < 1.0);  // deep quantum regime at these parameters
    CHECK(d.damping_rate == doctest::Approx(1e-3).epsilon(1e-15));
    CHECK(d.time_unit_seconds == doctest::Approx(1.0 / (2.0 * M_PI * 5e9)).epsilon(1e-15));

    const auto d2 = to_dimensionless(PhysicalParams{2e9, 0.01, 1e3});
    CHECK(d2.temperature == doctest::Approx(0.1041833).epsilon(1e-5));
}

TEST_CASE("temperature scale is linear in T and inverse in f") {
    const auto base = to_dimensionless(PhysicalParams{5e9, 0.01, 1e3});
    const auto warmer = to_dimensionless(PhysicalParams{5e9, 0.02, 1e3});
    const auto faster = to_dimensionless(PhysicalParams{10e9, 0.01, 1e3});
    CHECK(warmer.temperature == doctest::Approx(2.0 * base.temperature).epsilon(1e-12));
    CHECK(faster.temperature == doctest::Approx(0.5 * base.temperature).epsilon(1e-12));
}

TEST_CASE("cold limit drives the dimensionless temperature to zero") {
    const auto d = to_dimensionless(PhysicalParams{5e9, 1e-9, 1e3});
    CHECK(d.temperature < 1e-5);
}

TEST_CASE("round trip is the identity") {
    const PhysicalParams p{3.7e9, 0.013, 2.4e3};
    const PhysicalParams back = from_dimensionless(to_dimensionless(p));
    CHECK(back.frequency_hz == doctest::Approx(p.frequency_hz).epsilon(1e-12));
    CHECK(back.temperature_k == doctest::Approx(p.temperature_k).epsilon(1e-12));
    CHECK(back.q_factor == doctest::Approx(p.q_factor).epsilon(1e-12));
}

TEST_CASE("nonpositive inputs are rejected") {
    CHECK_THROWS_AS(to_dimensionless(PhysicalParams{0.0, 0.01, 1e3}), ConfigError);
    CHECK_THROWS_AS(to_dimensionless(PhysicalParams{5e9, -1.0, 1e3}), ConfigError);
    CHECK_THROWS_AS(to_dimensionless(PhysicalParams{5e9, 0.01, 0.0}), ConfigError);
}
