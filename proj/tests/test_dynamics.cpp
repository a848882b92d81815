#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "qchain/decoherence.hpp"
#include "qchain/dynamics.hpp"
#include "qchain/entanglement.hpp"

using namespace qchain;

TEST_CASE("free propagator is a quarter-period rotation at t = pi/2") {
    const Propagator p = propagator(Mat::Identity(3, 3), std::numbers::pi / 2.0);
    Mat expect = Mat::Zero(6, 6);
    expect.topRightCorner(3, 3) = Mat::Identity(3, 3);
    expect.bottomLeftCorner(3, 3) = -Mat::Identity(3, 3);
    CHECK((p.s - expect).cwiseAbs().maxCoeff() < 1e-14);
    const Propagator id = propagator(Mat::Identity(3, 3), 0.0);
    CHECK((id.s - Mat::Identity(6, 6)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("propagators are symplectic out to t = 100") {
    ChainSpec spec{8, 0.3, Boundary::periodic};
    const ModeBasis basis(build_potential(spec));
    for (double t : {0.0, 0.1, 1.0, 10.0, 50.0, 100.0})
        CHECK(symplectic_defect(propagator(basis, t)) <= 1e-10);
}

TEST_CASE("propagators compose: S(t1+t2) = S(t1) S(t2)") {
    ChainSpec spec{6, 0.4, Boundary::open};
    const ModeBasis basis(build_potential(spec));
    for (auto [t1, t2] : {std::pair{0.3, 0.9}, std::pair{2.0, 5.5}, std::pair{10.0, 40.0}}) {
        const Mat lhs = propagator(basis, t1 + t2).s;
        const Mat rhs = propagator(basis, t1).s * propagator(basis, t2).s;
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("evolution fixes the free vacuum and respects t = 0") {
    const Covariance vac = vacuum_state(4);
    const Covariance moved = evolve(vac, propagator(Mat::Identity(4, 4), 2.7));
    CHECK((moved.m - vac.m).cwiseAbs().maxCoeff() < 1e-14);
    ChainSpec spec{4, 0.2, Boundary::periodic};
    const Covariance g = gibbs_state(build_potential(spec), 0.7);
    const Covariance same = evolve(g, propagator(build_potential(spec), 0.0));
    CHECK((same.m - g.m).cwiseAbs().maxCoeff() < 1e-14);
    CHECK_THROWS_AS(evolve(vacuum_state(3), propagator(Mat::Identity(4, 4), 1.0)), PhysicsError);
}

TEST_CASE("closed evolution of a pure state stays pure out to t = 100") {
    ChainSpec spec{8, 0.3, Boundary::periodic};
    const ModeBasis basis(build_potential(spec));
    const Covariance vac = vacuum_state(8);
    for (double t : {1.0, 20.0, 100.0}) {
        const Vec nus = symplectic_eigenvalues(evolve(vac, propagator(basis, t)));
        CHECK((nus.array() - 1.0).abs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("f/g functions: initial conditions and the uncoupled limit") {
    ChainSpec spec{8, 0.3, Boundary::periodic};
    const FgFunctions fg0 = fg_functions(spec, 0.0);
    CHECK(fg0.f(0) == doctest::Approx(1.0).epsilon(1e-14));
    for (int k = 1; k < 8; ++k) CHECK(std::abs(fg0.f(k)) < 1e-14);
    CHECK(fg0.g.cwiseAbs().maxCoeff() < 1e-14);

    ChainSpec free_spec{8, 0.0, Boundary::periodic};
    const FgFunctions fg = fg_functions(free_spec, 1.3);
    CHECK(fg.f(0) == doctest::Approx(std::cos(1.3)).epsilon(1e-13));
    CHECK(fg.g(0) == doctest::Approx(std::sin(1.3)).epsilon(1e-13));
    for (int k = 1; k < 8; ++k) {
        CHECK(std::abs(fg.f(k)) < 1e-13);
        CHECK(std::abs(fg.g(k)) < 1e-13);
    }
    ChainSpec open_spec{8, 0.3, Boundary::open};
    CHECK_THROWS_AS(fg_functions(open_spec, 1.0), ConfigError);
    CHECK_THROWS_AS(fg_covariance(open_spec, 1.0), ConfigError);
}

TEST_CASE("f/g mode energy f.f + g.V.g = 1 is conserved") {
    ChainSpec spec{10, 0.45, Boundary::periodic};
    const Mat v = build_potential(spec);
    for (double t : {0.0, 0.7, 3.0, 25.0}) {
        const FgFunctions fg = fg_functions(spec, t);
        const double e = fg.f.dot(fg.f) + fg.g.dot(v * fg.g);
        CHECK(e == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("fg covariance: identity at t=0, translation invariant, matches spectral route") {
    ChainSpec spec{8, 0.3, Boundary::periodic};
    CHECK((fg_covariance(spec, 0.0).m - Mat::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-13);
    const ModeBasis basis(build_potential(spec));
    for (double t : {0.5, 1.0, 2.0, 5.0, 20.0}) {
        const Covariance a = fg_covariance(spec, t);
        const Covariance b = evolve(vacuum_state(8), propagator(basis, t));
        CHECK((a.m - b.m).cwiseAbs().maxCoeff() < 1e-10);
        // entries depend on (n - m) mod N only
        for (int n = 0; n < 8; ++n)
            for (int m = 0; m < 8; ++m) {
                const int lag = ((n - m) % 8 + 8) % 8;
                CHECK(a.m(n, m) == doctest::Approx(a.m(lag, 0)).epsilon(1e-12));
            }
    }
}

TEST_CASE("ramp schedule validation and shape") {
    RampSchedule bad{RampKind::sudden, 1.0, 0.1};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    RampSchedule lin{RampKind::linear, 4.0, 0.2};
    lin.validate();
    CHECK(lin.coupling_at(-1.0) == 0.0);
    CHECK(lin.coupling_at(1.0) == doctest::Approx(0.05));
    CHECK(lin.coupling_at(4.0) == doctest::Approx(0.2));
    CHECK(lin.coupling_at(100.0) == doctest::Approx(0.2));
}

TEST_CASE("sudden ramp equals the spectral quench") {
    ChainSpec spec{4, 0.3, Boundary::open};
    RampSchedule sched{RampKind::sudden, 0.0, 0.3};
    const auto traj = evolve_ramp(vacuum_state(4), spec, sched, 1e-3, 5.0, 0.5);
    const ModeBasis basis(build_potential(spec));
    REQUIRE(traj.size() == 11);
    for (const auto& s : traj) {
        const Covariance ref = evolve(vacuum_state(4), propagator(basis, s.t));
        CHECK((s.state.m - ref.m).cwiseAbs().maxCoeff() < 1e-8);
    }
}

TEST_CASE("zero target coupling leaves the vacuum in place") {
    ChainSpec spec{4, 0.0, Boundary::periodic};
    RampSchedule sched{RampKind::linear, 2.0, 0.0};
    const auto traj = evolve_ramp(vacuum_state(4), spec, sched, 1e-3, 6.0, 1.0);
    for (const auto& s : traj)
        CHECK((s.state.m - Mat::Identity(8, 8)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("ramped trajectory matches a midpoint-exponential integrator") {
    // independent route: compose exact constant-coupling propagators over
    // small steps with the coupling frozen at each midpoint
    ChainSpec spec{4, 0.3, Boundary::open};
    RampSchedule sched{RampKind::linear, 2.0, 0.3};
    const auto traj = evolve_ramp(vacuum_state(4), spec, sched, 1e-3, 2.0, 0.5);
    const double h = 1e-3;
    Covariance g = vacuum_state(4);
    std::size_t idx = 0;
    for (int step = 0; step < 2000; ++step) {
        const double t = step * h;
        if (idx < traj.size() && std::abs(traj[idx].t - t) < 1e-9) {
            CHECK((traj[idx].state.m - g.m).cwiseAbs().maxCoeff() < 1e-5);
            ++idx;
        }
        const double c_mid = sched.coupling_at(t + h / 2.0);
        g = evolve(g, propagator(build_potential(spec, c_mid), h));
    }
    CHECK((traj.back().state.m - g.m).cwiseAbs().maxCoeff() < 1e-5);
    // the ramped endpoint genuinely differs from the sudden one
    const ModeBasis basis(build_potential(spec));
    const Covariance sudden = evolve(vacuum_state(4), propagator(basis, 2.0));
    CHECK((traj.back().state.m - sudden.m).cwiseAbs().maxCoeff() > 1e-2);
}

TEST_CASE("ramped endpoint converges at 4th order in dt") {
    ChainSpec spec{4, 0.3, Boundary::open};
    RampSchedule sched{RampKind::linear, 1.0, 0.3};
    auto endpoint = [&](double dt) {
        const auto traj = evolve_ramp(vacuum_state(4), spec, sched, dt, 1.0, 1.0);
        return traj.back().state.m;
    };
    const Mat ref = endpoint(1.0 / 1024.0);
    const double e1 = (endpoint(1.0 / 32.0) - ref).cwiseAbs().maxCoeff();
    const double e2 = (endpoint(1.0 / 64.0) - ref).cwiseAbs().maxCoeff();
    CHECK(e1 / e2 >= 8.0);
}

TEST_CASE("linear ramp agrees with the sudden quench as t' -> 0") {
    ChainSpec spec{4, 0.25, Boundary::open};
    RampSchedule sched{RampKind::linear, 1e-4, 0.25};
    const auto traj = evolve_ramp(vacuum_state(4), spec, sched, 1e-5, 3.0, 1.0);
    const ModeBasis basis(build_potential(spec));
    const Covariance ref = evolve(vacuum_state(4), propagator(basis, 3.0));
    CHECK((traj.back().state.m - ref.m).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("tracked moments equal the reduced full evolution") {
    // bare chain, all sites tracked
    ChainSpec spec{6, 0.35, Boundary::periodic};
    const Mat v = build_potential(spec);
    const ModeBasis basis(v);
    {
        TrackedEvolver ev(v, {0, 1, 2, 3, 4, 5});
        const Covariance full = evolve(vacuum_state(6), propagator(basis, 3.7));
        CHECK((ev.reduced_at(3.7).m - full.m).cwiseAbs().maxCoeff() < 1e-10);
    }
    // bath-augmented system, general (correlated) initial state
    {
        ChainSpec small{2, 0.3, Boundary::open};
        BathSpec bath{50, 5.0, 0.05, 0.2};
        const Mat va = augment_with_baths(build_potential(small), bath);
        const Covariance g0 = gibbs_state(augment_with_baths(build_potential(small, 0.0), bath),
                                          bath.temperature);
        TrackedEvolver ev(va, g0, {0, 1});
        const ModeBasis big(va);
        std::mt19937 rng(2);
        std::uniform_real_distribution<double> u(0.1, 20.0);
        for (int trial = 0; trial < 5; ++trial) {
            const double t = u(rng);
            const Covariance full = evolve(g0, propagator(big, t));
            const Covariance red = reduce(full, {0, 1});
            CHECK((ev.reduced_at(t).m - red.m).cwiseAbs().maxCoeff() < 1e-10);
        }
    }
}

TEST_CASE("tracked vacuum under the free Hamiltonian is stationary") {
    TrackedEvolver ev(Mat::Identity(5, 5), {1, 3});
    for (double t : {0.0, 1.0, 17.0})
        CHECK((ev.reduced_at(t).m - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-13);
}
