#include "qchain/validate.hpp"

#include <cmath>
#include <sstream>

#include "qchain/dynamics.hpp"
#include "qchain/entanglement.hpp"
#include "qchain/scenario.hpp"

namespace qchain {

namespace {

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(3);
    s << std::scientific << x;
    return s.str();
}

}  // namespace

std::vector<CheckResult> run_validation_suite() {
    std::vector<CheckResult> out;
    auto push = [&](const std::string& name, bool ok, const std::string& detail) {
        out.push_back({name, ok, detail});
    };

    // propagator symplecticity across couplings and times
    {
        double worst = 0.0;
        for (double c : {0.1, 0.3, 0.5}) {
            ChainSpec spec{8, c, Boundary::periodic};
            ModeBasis basis(build_potential(spec));
            for (double t : {0.0, 0.5, 5.0, 50.0, 100.0})
                worst = std::max(worst, symplectic_defect(propagator(basis, t)));
        }
        push("propagator_symplectic", worst <= 1e-10, "max defect " + fmt(worst));
    }

    // closed dynamics preserves purity of the vacuum
    {
        ChainSpec spec{8, 0.3, Boundary::periodic};
        ModeBasis basis(build_potential(spec));
        const Covariance g0 = vacuum_state(8);
        double worst = 0.0;
        for (double t : {1.0, 10.0, 100.0}) {
            const Vec nus = symplectic_eigenvalues(evolve(g0, propagator(basis, t)));
            worst = std::max(worst, (nus.array() - 1.0).abs().maxCoeff());
        }
        push("closed_purity", worst <= 1e-8, "max |nu-1| " + fmt(worst));
    }

    // analytic f/g route against the spectral route
    {
        ChainSpec spec{8, 0.3, Boundary::periodic};
        ModeBasis basis(build_potential(spec));
        double worst = 0.0;
        for (double t : {0.5, 2.0, 20.0}) {
            const Covariance a = fg_covariance(spec, t);
            const Covariance b = evolve(vacuum_state(8), propagator(basis, t));
            worst = std::max(worst, (a.m - b.m).cwiseAbs().maxCoeff());
        }
        push("fg_vs_spectral", worst <= 1e-10, "max entry diff " + fmt(worst));
    }

    // witness never exceeds the log-negativity on sampled quench states
    {
        ScenarioConfig cfg;
        cfg.chain = {8, 0.3, Boundary::periodic};
        cfg.site_a = 0;
        cfg.site_b = 4;
        cfg.grid = {20.0, 0.5};
        const ScenarioResult r = run_quench(cfg);
        bool ok = true;
        double worst = 0.0;
        for (const auto& s : r.series) {
            worst = std::max(worst, s.witness - s.entanglement);
            if (s.witness > s.entanglement + 1e-12) ok = false;
        }
        push("witness_bound", ok, "max witness-E_N " + fmt(worst));
    }

    // sampled states stay physical
    {
        ScenarioConfig cfg;
        cfg.chain = {8, 0.2, Boundary::open};
        cfg.site_a = 0;
        cfg.site_b = 7;
        cfg.grid = {20.0, 0.5};
        const ScenarioResult r = run_quench(cfg);
        double worst = 0.0;
        for (const auto& s : r.series) worst = std::min(worst, s.validity_margin);
        push("state_validity", worst >= -1e-8, "min margin " + fmt(worst));
    }

    // ground state of the coupled chain: no entanglement beyond neighbors
    {
        double worst = 0.0;
        for (double c : {0.3, 0.5}) {
            ChainSpec spec{12, c, Boundary::periodic};
            const Covariance g = gibbs_state(build_potential(spec), 0.0);
            for (int d = 2; d <= 6; ++d)
                worst = std::max(worst, log_negativity(reduce(g, {0, d}), {0}));
        }
        push("ground_state_separability", worst == 0.0, "max distant E_N " + fmt(worst));
    }

    return out;
}

}  // namespace qchain
