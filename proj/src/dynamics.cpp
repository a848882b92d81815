#include "qchain/dynamics.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <numbers>

#include "qchain/kernels.hpp"

namespace qchain {

Propagator propagator(const ModeBasis& basis, double t) {
    if (!(t >= 0.0)) throw ConfigError("propagation time must be >= 0");
    const int n = basis.size();
    const Vec& w = basis.omega();
    Vec cos_wt(n), sin_over_w(n), w_sin(n);
    for (int i = 0; i < n; ++i) {
        const double wt = w(i) * t;
        cos_wt(i) = std::cos(wt);
        const double s = std::sin(wt);
        sin_over_w(i) = s / w(i);
        w_sin(i) = w(i) * s;
    }
    Mat s(2 * n, 2 * n);
    const Mat c = basis.congruence(cos_wt);
    s.topLeftCorner(n, n) = c;
    s.bottomRightCorner(n, n) = c;
    s.topRightCorner(n, n) = basis.congruence(sin_over_w);
    s.bottomLeftCorner(n, n) = -basis.congruence(w_sin);
    return Propagator{std::move(s)};
}

Propagator propagator(const Mat& v, double t) { return propagator(ModeBasis(v), t); }

double symplectic_defect(const Propagator& p) {
    const Mat sigma = symplectic_form(p.modes());
    return (p.s * sigma * p.s.transpose() - sigma).cwiseAbs().maxCoeff();
}

Covariance evolve(const Covariance& g0, const Propagator& p) {
    if (g0.m.rows() != p.s.rows())
        throw PhysicsError("dimension mismatch between state and propagator");
    Covariance out(Mat((p.s * g0.m * p.s.transpose()).eval()));
    out.symmetrize();
    return out;
}

FgFunctions fg_functions(const ChainSpec& spec, double t) {
    spec.validate();
    if (spec.boundary != Boundary::periodic)
        throw ConfigError("f/g propagation functions are defined for periodic chains only");
    const int n = spec.n_sites;
    Vec omega(n), cos_wt(n), sin_wt_over(n);
    for (int l = 1; l <= n; ++l) {
        omega(l - 1) = dispersion(spec, l);
        cos_wt(l - 1) = std::cos(omega(l - 1) * t);
        sin_wt_over(l - 1) = std::sin(omega(l - 1) * t) / omega(l - 1);
    }
    FgFunctions fg{Vec(n), Vec(n)};
    for (int k = 0; k < n; ++k) {
        double fsum = 0.0, gsum = 0.0;
        for (int l = 1; l <= n; ++l) {
            const double ph = std::cos(2.0 * std::numbers::pi * static_cast<double>(k) *
                                       static_cast<double>(l) / static_cast<double>(n));
            fsum += ph * cos_wt(l - 1);
            gsum += ph * sin_wt_over(l - 1);
        }
        fg.f(k) = fsum / n;
        fg.g(k) = gsum / n;
    }
    return fg;
}

namespace {

// circular lag sum: out[lag] = sum_j x[j] * y[(j + lag) mod N]
Vec circular_lag_sum(const Vec& x, const Vec& y) {
    const int n = static_cast<int>(x.size());
    Vec out(n);
    for (int lag = 0; lag < n; ++lag) {
        double s = 0.0;
        for (int j = 0; j < n; ++j) s += x(j) * y((j + lag) % n);
        out(lag) = s;
    }
    return out;
}

}  // namespace

Covariance fg_covariance(const ChainSpec& spec, double t) {
    spec.validate();
    if (spec.boundary != Boundary::periodic)
        throw ConfigError("f/g covariance route is defined for periodic chains only");
    const int n = spec.n_sites;
    const FgFunctions fg = fg_functions(spec, t);
    // h = df/dt = -(1/N) sum_l omega_l sin(omega_l t) cos(2 pi k l / N)
    Vec h(n);
    for (int k = 0; k < n; ++k) {
        double s = 0.0;
        for (int l = 1; l <= n; ++l) {
            const double w = dispersion(spec, l);
            s += std::cos(2.0 * std::numbers::pi * static_cast<double>(k) *
                          static_cast<double>(l) / static_cast<double>(n)) *
                 w * std::sin(w * t);
        }
        h(k) = -s / n;
    }
    const Vec ff = circular_lag_sum(fg.f, fg.f);
    const Vec gg = circular_lag_sum(fg.g, fg.g);
    const Vec hh = circular_lag_sum(h, h);
    const Vec fh = circular_lag_sum(fg.f, h);
    const Vec gf = circular_lag_sum(fg.g, fg.f);
    Mat g = Mat::Zero(2 * n, 2 * n);
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            const int lag = ((a - b) % n + n) % n;
            g(a, b) = ff(lag) + gg(lag);                    // qq
            g(n + a, n + b) = hh(lag) + ff(lag);            // pp
            g(a, n + b) = fh(lag) + gf(lag);                // q_a p_b
            g(n + b, a) = g(a, n + b);
        }
    }
    Covariance out(std::move(g));
    out.symmetrize();
    return out;
}

void RampSchedule::validate() const {
    if (!(duration >= 0.0)) throw ConfigError("ramp.duration must be >= 0");
    if (!(target_coupling >= 0.0)) throw ConfigError("ramp target coupling must be >= 0");
    if (kind == RampKind::sudden && duration != 0.0)
        throw ConfigError("a sudden ramp must have duration 0");
    if (kind == RampKind::linear && duration == 0.0)
        throw ConfigError("a linear ramp must have duration > 0 (use kind=sudden for t'=0)");
}

double RampSchedule::coupling_at(double t) const {
    if (kind == RampKind::sudden || t >= duration) return target_coupling;
    if (t <= 0.0) return 0.0;
    return target_coupling * t / duration;
}

namespace {

double purity_of(const Mat& g) {
    // 1/sqrt(det Gamma) via Cholesky log-determinant
    Eigen::LLT<Mat> llt(g);
    if (llt.info() != Eigen::Success) throw PhysicsError("covariance lost positive definiteness");
    double logdet = 0.0;
    for (int i = 0; i < g.rows(); ++i) logdet += std::log(llt.matrixL()(i, i));
    return std::exp(-logdet);
}

}  // namespace

std::vector<TrajectorySample> evolve_ramp(const Covariance& g0, const ChainSpec& spec,
                                          const RampSchedule& schedule, double dt, double t_end,
                                          double dt_sample) {
    spec.validate();
    schedule.validate();
    if (!(dt > 0.0)) throw ConfigError("integrator dt must be > 0");
    if (!(dt_sample > 0.0)) throw ConfigError("dt_sample must be > 0");
    const double t_prime = schedule.kind == RampKind::sudden ? 0.0 : schedule.duration;
    if (t_end < t_prime) throw ConfigError("t_end must be >= the ramp duration");

    const int n = spec.n_sites;
    if (g0.m.rows() != 2 * n) throw PhysicsError("initial state dimension mismatch");
    const Mat v_target = build_potential(spec, schedule.target_coupling);
    // V(c) = I + c * bond_part: the bond Laplacian at unit coupling
    const Mat bond_part = schedule.target_coupling > 0.0
                              ? Mat((v_target - Mat::Identity(n, n)) / schedule.target_coupling)
                              : Mat::Zero(n, n);

    const double expected_purity = purity_of(g0.m);
    std::vector<TrajectorySample> out;
    const int n_samples = static_cast<int>(std::floor(t_end / dt_sample + 1e-9)) + 1;
    out.reserve(n_samples);

    auto record = [&](double t, const Covariance& g) {
        Covariance s = g;
        s.symmetrize();
        const Validity val = check_valid(s);
        if (!val.ok)
            throw PhysicsError("ramp trajectory left the physical cone at t=" + std::to_string(t) +
                               " (margin " + std::to_string(val.margin) + ")");
        if (std::abs(purity_of(s.m) - expected_purity) > 1e-6)
            throw StabilityError("symplectic purity drifted beyond 1e-6 at t=" + std::to_string(t) +
                                 "; reduce the integrator dt");
        out.push_back({t, std::move(s)});
    };

    // derivative of Gamma for the instantaneous coupling
    auto deriv = [&](double t, const Mat& g) -> Mat {
        const double c = schedule.coupling_at(t);
        Mat ag(2 * n, 2 * n);
        // A = [[0, I], [-V, 0]]  =>  A*Gamma = [[Gamma_pq rows], [-V Gamma_q rows]]
        ag.topRows(n) = g.bottomRows(n);
        const Mat v = Mat::Identity(n, n) + c * bond_part;
        ag.bottomRows(n) = -v * g.topRows(n);
        return ag + ag.transpose();
    };

    Mat g = g0.m;
    double t = 0.0;
    int next_sample = 0;
    auto maybe_record = [&](double tt, const Mat& gm) {
        while (next_sample < n_samples &&
               static_cast<double>(next_sample) * dt_sample <= tt + 1e-12) {
            record(static_cast<double>(next_sample) * dt_sample, Covariance(gm));
            ++next_sample;
        }
    };

    if (t_prime > 0.0) {
        maybe_record(0.0, g);
        while (t < t_prime - 1e-12) {
            // land exactly on sample times and on t'
            double h = dt;
            const double next_t = static_cast<double>(next_sample) * dt_sample;
            if (next_sample < n_samples && next_t > t && next_t - t < h) h = next_t - t;
            if (t_prime - t < h) h = t_prime - t;
            const Mat k1 = deriv(t, g);
            const Mat k2 = deriv(t + h / 2, g + (h / 2) * k1);
            const Mat k3 = deriv(t + h / 2, g + (h / 2) * k2);
            const Mat k4 = deriv(t + h, g + h * k3);
            g = g + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            t += h;
            maybe_record(t, g);
        }
        t = t_prime;
    }

    // constant-potential stretch: exact spectral propagation from Gamma(t')
    const ModeBasis basis(v_target);
    const Covariance g_at_ramp_end{Mat(g)};
    while (next_sample < n_samples) {
        const double ts = static_cast<double>(next_sample) * dt_sample;
        if (ts < t - 1e-12) {
            ++next_sample;
            continue;
        }
        const Propagator p = propagator(basis, ts - t);
        record(ts, evolve(g_at_ramp_end, p));
        ++next_sample;
    }
    return out;
}

TrackedEvolver::TrackedEvolver(const Mat& v, std::vector<int> sites)
    : basis_(v), sites_(std::move(sites)), identity_g0_(true) {
    for (int s : sites_)
        if (s < 0 || s >= basis_.size()) throw ConfigError("tracked site out of range");
}

TrackedEvolver::TrackedEvolver(const Mat& v, Covariance g0, std::vector<int> sites)
    : basis_(v), sites_(std::move(sites)), g0_(std::move(g0.m)), identity_g0_(false) {
    if (g0_.rows() != 2 * basis_.size())
        throw PhysicsError("initial state dimension mismatch with potential");
    for (int s : sites_)
        if (s < 0 || s >= basis_.size()) throw ConfigError("tracked site out of range");
    if (g0_.isIdentity(1e-15)) {
        identity_g0_ = true;
        g0_.resize(0, 0);
    }
}

Covariance TrackedEvolver::reduced_at(double t) const {
    const int n = basis_.size();
    const int k = static_cast<int>(sites_.size());
    const Vec& w = basis_.omega();
    Vec cos_wt(n), sin_over_w(n), w_sin(n);
    for (int i = 0; i < n; ++i) {
        const double wt = w(i) * t;
        cos_wt(i) = std::cos(wt);
        const double s = std::sin(wt);
        sin_over_w(i) = s / w(i);
        w_sin(i) = w(i) * s;
    }
    // rows of S(t) for each tracked site: q-row (cos | sin/w), p-row (-w sin | cos)
    using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
    RowMat rows(2 * k, 2 * n);
    Vec scratch(n);
    for (int a = 0; a < k; ++a) {
        const int s = sites_[a];
        basis_.congruence_row(cos_wt, s, scratch.data());
        rows.row(a).head(n) = scratch;
        rows.row(k + a).tail(n) = scratch;
        basis_.congruence_row(sin_over_w, s, scratch.data());
        rows.row(a).tail(n) = scratch;
        basis_.congruence_row(w_sin, s, scratch.data());
        rows.row(k + a).head(n) = -scratch;
    }
    Mat red(2 * k, 2 * k);
    if (identity_g0_) {
        const auto& kr = kern::ops();
        for (int a = 0; a < 2 * k; ++a)
            for (int b = 0; b <= a; ++b) {
                const double val =
                    kr.dot(rows.row(a).data(), rows.row(b).data(), static_cast<std::size_t>(2 * n));
                red(a, b) = val;
                red(b, a) = val;
            }
    } else {
        const Mat tmp = rows * g0_;
        red = tmp * rows.transpose();
        red = ((red + red.transpose()) * 0.5).eval();
    }
    return Covariance(std::move(red));
}

std::vector<Covariance> tracked_moments(const Mat& v, const Covariance& g0,
                                        std::span<const int> sites,
                                        std::span<const double> times) {
    TrackedEvolver ev(v, g0, std::vector<int>(sites.begin(), sites.end()));
    std::vector<Covariance> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(ev.reduced_at(t));
    return out;
}

}  // namespace qchain
