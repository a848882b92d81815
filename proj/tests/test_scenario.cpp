#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qchain/scenario.hpp"

using namespace qchain;

TEST_CASE("onset: never-crossing series reports none") {
    std::vector<double> ts = {0.0, 1.0, 2.0};
    std::vector<double> es = {0.0, 0.0, 0.0};
    CHECK_FALSE(onset_time(ts, es).has_value());
}

TEST_CASE("onset interpolates linearly inside the crossing interval") {
    std::vector<double> ts, es;
    for (int i = 0; i <= 20; ++i) {
        ts.push_back(0.1 * i);
        es.push_back(i <= 10 ? 0.0 : 0.5);
    }
    const auto t0 = onset_time(ts, es);
    REQUIRE(t0.has_value());
    CHECK(*t0 > ts[10]);
    CHECK(*t0 < ts[11]);
    // exact interpolation: eps/0.5 of the way into the interval
    CHECK(*t0 == doctest::Approx(1.0 + 0.1 * kOnsetEps / 0.5).epsilon(1e-12));
}

TEST_CASE("first maximum skips precursor ripples") {
    std::vector<double> ts, es;
    for (int i = 0; i <= 400; ++i) {
        const double t = 0.1 * i;
        ts.push_back(t);
        // small ripple near t=2, principal wave peaking at t=20
        double e = 0.0;
        if (t > 1.0 && t < 3.0) e = 1e-4 * std::sin((t - 1.0) * std::numbers::pi / 2.0);
        if (t > 5.0) e = 0.05 * std::exp(-0.02 * (t - 20.0) * (t - 20.0));
        es.push_back(e);
    }
    const auto fm = first_maximum(ts, es);
    REQUIRE(fm.has_value());
    CHECK(fm->first == doctest::Approx(20.0).epsilon(0.01));
    CHECK(fm->second == doctest::Approx(0.05).epsilon(0.01));
    // an all-quiet series has no maximum
    std::vector<double> zero(ts.size(), 0.0);
    CHECK_FALSE(first_maximum(ts, zero).has_value());
}

TEST_CASE("linear fit recovers a line exactly") {
    std::vector<double> x = {1.0, 2.0, 3.0, 4.0};
    std::vector<double> y = {1.5, 3.5, 5.5, 7.5};
    const LinearFit f = linear_fit(x, y);
    CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quench with zero coupling never entangles") {
    ScenarioConfig cfg;
    cfg.chain = {8, 0.0, Boundary::periodic};
    cfg.site_a = 0;
    cfg.site_b = 4;
    cfg.grid = {10.0, 0.5};
    const ScenarioResult r = run_quench(cfg);
    for (const auto& s : r.series) CHECK(s.entanglement == 0.0);
    CHECK_FALSE(r.stats.onset.has_value());
}

TEST_CASE("quench series: separable interval, then entanglement; samples stay valid") {
    ScenarioConfig cfg;
    cfg.chain = {8, 0.3, Boundary::periodic};
    cfg.site_a = 0;
    cfg.site_b = 4;
    cfg.grid = {30.0, 0.05};
    const ScenarioResult r = run_quench(cfg);
    CHECK(r.series.front().entanglement == 0.0);
    REQUIRE(r.stats.onset.has_value());
    CHECK(*r.stats.onset > 0.5);
    CHECK(r.stats.peak > 0.1);
    for (const auto& s : r.series) {
        CHECK(s.validity_margin >= -1e-8);
        CHECK(s.witness <= s.entanglement + 1e-12);
    }
}

TEST_CASE("periodic quench is invariant under rotating the tracked pair") {
    ScenarioConfig a, b;
    a.chain = b.chain = {8, 0.2, Boundary::periodic};
    a.grid = b.grid = {15.0, 0.25};
    a.site_a = 0;
    a.site_b = 4;
    b.site_a = 3;
    b.site_b = 7;  // same separation, rotated by 3
    const auto ra = run_quench(a);
    const auto rb = run_quench(b);
    REQUIRE(ra.series.size() == rb.series.size());
    for (std::size_t i = 0; i < ra.series.size(); ++i)
        CHECK(ra.series[i].entanglement ==
              doctest::Approx(rb.series[i].entanglement).epsilon(1e-10));
}

TEST_CASE("onset times grow with distance on a longer chain") {
    ScenarioConfig cfg;
    cfg.chain = {16, 0.1, Boundary::periodic};
    cfg.grid = {60.0, 0.05};
    double prev = -1.0;
    for (int d = 2; d <= 8; ++d) {
        cfg.site_a = 0;
        cfg.site_b = d;
        const auto r = run_quench(cfg);
        REQUIRE(r.stats.onset.has_value());
        CHECK(*r.stats.onset > prev);
        prev = *r.stats.onset;
    }
}

TEST_CASE("ramp scan: a fast switch reproduces the sudden first maximum") {
    ScenarioConfig cfg;
    cfg.kind = ScenarioKind::ramp_scan;
    cfg.chain = {4, 0.3, Boundary::open};
    cfg.site_a = 0;
    cfg.site_b = 3;
    cfg.grid = {30.0, 0.05};
    cfg.ramp_durations = {0.05};
    const RampScanResult scan = run_ramp_scan(cfg);
    CHECK(scan.sudden_first_max > 0.0);
    REQUIRE(scan.points.size() == 1);
    CHECK(scan.points[0].first_max ==
          doctest::Approx(scan.sudden_first_max).epsilon(0.02));
}

TEST_CASE("channel: injected pair starts maximally entangled with site 1, r=0 stays silent") {
    ScenarioConfig cfg;
    cfg.kind = ScenarioKind::channel;
    cfg.chain = {4, 0.1, Boundary::open};
    cfg.grid = {20.0, 0.1};
    cfg.squeezing = 1.0;
    const ChannelResult r = run_channel(cfg);
    REQUIRE(r.arrivals.size() == 4);
    CHECK(r.arrivals[0] == doctest::Approx(0.0));  // entangled from the start
    CHECK(r.arrivals[1] > 0.0);

    cfg.squeezing = 0.0;
    const ChannelResult r0 = run_channel(cfg);
    for (double a : r0.arrivals) CHECK(std::isnan(a));
    for (const auto& s : r0.last_site_series) CHECK(s.entanglement == 0.0);
}

TEST_CASE("falloff on a short chain: onsets grow, peaks shrink with distance") {
    ScenarioConfig cfg;
    cfg.kind = ScenarioKind::falloff;
    cfg.chain = {32, 0.1, Boundary::periodic};
    cfg.grid = {80.0, 0.1};
    cfg.falloff_distances = {2, 3, 4, 5, 6};
    const FalloffResult r = run_falloff(cfg);
    REQUIRE(r.rows.size() == 5);
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
        CHECK(r.rows[i].peak < r.rows[i - 1].peak);
        REQUIRE(r.rows[i].onset.has_value());
        CHECK(*r.rows[i].onset > *r.rows[i - 1].onset);
    }
    CHECK(r.loglog_fit.slope < 0.0);
}

TEST_CASE("scan results do not depend on the worker count") {
    ScenarioConfig cfg;
    cfg.kind = ScenarioKind::falloff;
    cfg.chain = {24, 0.15, Boundary::periodic};
    cfg.grid = {40.0, 0.2};
    cfg.falloff_distances = {2, 3, 4, 6, 8};
    cfg.threads = 1;
    const FalloffResult a = run_falloff(cfg);
    cfg.threads = 4;
    const FalloffResult b = run_falloff(cfg);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].peak == b.rows[i].peak);  // bitwise: same work, same order
        CHECK(a.rows[i].onset.value_or(-1.0) == b.rows[i].onset.value_or(-1.0));
    }
}

TEST_CASE("config validation rejects inconsistent scenarios") {
    ScenarioConfig cfg;
    cfg.chain = {8, 0.3, Boundary::periodic};
    cfg.site_a = 0;
    cfg.site_b = 8;  // out of range
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.site_b = 0;  // duplicate
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.site_b = 4;
    cfg.kind = ScenarioKind::decohere;  // bath missing
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg.kind = ScenarioKind::falloff;
    cfg.chain.boundary = Boundary::open;  // falloff wants periodic
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
