#include "qchain/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

namespace qchain {

namespace {

double now_seconds() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

constexpr double kLn2 = 0.6931471805599453;

double to_base2(double value, LogBase base) {
    return base == LogBase::two ? value : value / kLn2;
}
double to_natural(double value, LogBase base) {
    return base == LogBase::natural ? value : value * kLn2;
}

}  // namespace

const char* to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::quench: return "quench";
        case ScenarioKind::ramp_scan: return "ramp_scan";
        case ScenarioKind::decohere: return "decohere";
        case ScenarioKind::channel: return "channel";
        case ScenarioKind::falloff: return "falloff";
        case ScenarioKind::calibrate: return "calibrate";
    }
    return "?";
}

ScenarioKind scenario_kind_from(const std::string& s) {
    if (s == "quench") return ScenarioKind::quench;
    if (s == "ramp_scan" || s == "ramp-scan") return ScenarioKind::ramp_scan;
    if (s == "decohere") return ScenarioKind::decohere;
    if (s == "channel") return ScenarioKind::channel;
    if (s == "falloff") return ScenarioKind::falloff;
    if (s == "calibrate") return ScenarioKind::calibrate;
    throw ConfigError("unknown scenario kind '" + s + "'");
}

void TimeGrid::validate() const {
    if (!(t_end > 0.0)) throw ConfigError("time.t_end must be > 0");
    if (!(dt_sample > 0.0)) throw ConfigError("time.dt_sample must be > 0");
}

std::vector<double> TimeGrid::times() const {
    validate();
    const int n = static_cast<int>(std::floor(t_end / dt_sample + 1e-9)) + 1;
    std::vector<double> out(n);
    for (int i = 0; i < n; ++i) out[i] = i * dt_sample;
    return out;
}

void ScenarioConfig::validate() const {
    chain.validate();
    grid.validate();
    if (!(rk_dt > 0.0)) throw ConfigError("time.dt must be > 0");
    const int n = chain.n_sites;
    auto check_site = [&](int s, const char* name) {
        if (s < 0 || s >= n)
            throw ConfigError(std::string("pair.") + name + " out of range 1.." + std::to_string(n));
    };
    check_site(site_a, "site_a");
    check_site(site_b, "site_b");
    if (site_a == site_b) throw ConfigError("pair sites must be distinct");
    if (kind == ScenarioKind::decohere || kind == ScenarioKind::calibrate) {
        if (!bath.has_value())
            throw ConfigError(std::string(to_string(kind)) + " scenario requires a [bath] section");
        bath->validate();
        if (!physical.has_value() && bath->coupling == 0.0 && kind == ScenarioKind::decohere)
            throw ConfigError("decohere requires [physical] parameters or an explicit bath.coupling");
    }
    if (kind == ScenarioKind::ramp_scan) {
        if (ramp_durations.empty()) throw ConfigError("ramp scan needs at least one duration");
        for (double tp : ramp_durations)
            if (!(tp > 0.0)) throw ConfigError("ramp scan durations must be > 0");
    }
    if (kind == ScenarioKind::channel && !(squeezing >= 0.0))
        throw ConfigError("channel.squeezing must be >= 0");
    if (kind == ScenarioKind::falloff) {
        if (chain.boundary != Boundary::periodic)
            throw ConfigError("falloff scans run on periodic chains");
        for (int d : falloff_distances)
            if (d < 1 || d >= chain.n_sites)
                throw ConfigError("falloff distance " + std::to_string(d) + " out of range");
    }
    if (threads < 1) throw ConfigError("threads must be >= 1");
}

std::optional<double> onset_time(std::span<const double> ts, std::span<const double> es,
                                 double eps) {
    for (std::size_t i = 0; i < es.size(); ++i) {
        if (es[i] > eps) {
            if (i == 0) return ts[0];
            const double de = es[i] - es[i - 1];
            if (de <= 0.0) return ts[i];
            return ts[i - 1] + (eps - es[i - 1]) * (ts[i] - ts[i - 1]) / de;
        }
    }
    return std::nullopt;
}

std::optional<std::pair<double, double>> first_maximum(std::span<const double> ts,
                                                       std::span<const double> es, double eps,
                                                       double frac) {
    double emax = 0.0;
    std::size_t imax = 0;
    for (std::size_t i = 0; i < es.size(); ++i) {
        if (es[i] > emax) {
            emax = es[i];
            imax = i;
        }
    }
    if (emax <= eps) return std::nullopt;
    for (std::size_t i = 1; i + 1 < es.size(); ++i) {
        if (es[i] >= es[i - 1] && es[i] > es[i + 1] && es[i] >= frac * emax)
            return std::make_pair(ts[i], es[i]);
    }
    return std::make_pair(ts[imax], emax);
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("fit needs >= 2 points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw ConfigError("fit abscissas are degenerate");
    LinearFit f{};
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0.0, ss_tot = 0.0;
    const double ybar = sy / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double pred = f.slope * x[i] + f.intercept;
        ss_res += (y[i] - pred) * (y[i] - pred);
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    f.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

namespace {

SeriesSample sample_from_pair_state(double t, const Covariance& red, LogBase base) {
    static const std::vector<int> part_a = {0};
    const double en = log_negativity(red, std::span<const int>(part_a), base);
    const double wit = epr_witness_bound(red, 0, 1, base);
    const double nu_pt = min_pt_symplectic_eigenvalue(red, std::span<const int>(part_a));
    const Validity val = check_valid(red);
    if (!val.ok)
        throw PhysicsError("sampled state violates the uncertainty bound at t=" +
                           std::to_string(t) + " (margin " + std::to_string(val.margin) + ")");
    return SeriesSample{t, en, wit, nu_pt, val.margin};
}

SeriesStats stats_from_series(const std::vector<SeriesSample>& series) {
    std::vector<double> ts(series.size()), es(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        ts[i] = series[i].t;
        es[i] = series[i].entanglement;
    }
    SeriesStats st;
    st.onset = onset_time(ts, es);
    for (std::size_t i = 0; i < es.size(); ++i) {
        if (es[i] > st.peak) {
            st.peak = es[i];
            st.peak_time = ts[i];
        }
    }
    if (const auto fm = first_maximum(ts, es)) {
        st.first_max_time = fm->first;
        st.first_max = fm->second;
    }
    return st;
}

std::vector<SeriesSample> series_from_tracked(const TrackedEvolver& ev,
                                              const std::vector<double>& times, LogBase base) {
    std::vector<SeriesSample> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(sample_from_pair_state(t, ev.reduced_at(t), base));
    return out;
}

ScenarioResult result_from_series(std::vector<SeriesSample> series, LogBase base) {
    ScenarioResult r;
    r.series = std::move(series);
    r.stats = stats_from_series(r.series);
    r.peak_base2 = to_base2(r.stats.peak, base);
    r.peak_natural = to_natural(r.stats.peak, base);
    return r;
}

}  // namespace

ScenarioResult run_quench(const ScenarioConfig& cfg) {
    cfg.validate();
    const double t0 = now_seconds();
    const Mat v = build_potential(cfg.chain);
    TrackedEvolver ev(v, {cfg.site_a, cfg.site_b});
    ScenarioResult r = result_from_series(series_from_tracked(ev, cfg.grid.times(), cfg.log_base),
                                          cfg.log_base);
    r.wall_seconds = now_seconds() - t0;
    return r;
}

RampScanResult run_ramp_scan(const ScenarioConfig& cfg) {
    cfg.validate();
    const double t0 = now_seconds();
    RampScanResult scan;

    auto first_max_for = [&](double t_prime) -> RampPoint {
        RampSchedule sched;
        sched.kind = t_prime == 0.0 ? RampKind::sudden : RampKind::linear;
        sched.duration = t_prime;
        sched.target_coupling = cfg.chain.coupling;
        const double horizon = t_prime + cfg.grid.t_end;
        const auto traj = evolve_ramp(vacuum_state(cfg.chain.n_sites), cfg.chain, sched, cfg.rk_dt,
                                      horizon, cfg.grid.dt_sample);
        std::vector<double> ts, es;
        ts.reserve(traj.size());
        es.reserve(traj.size());
        const std::vector<int> pair = {cfg.site_a, cfg.site_b};
        for (const auto& s : traj) {
            ts.push_back(s.t);
            es.push_back(log_negativity(reduce(s.state, std::span<const int>(pair)), {0},
                                        cfg.log_base));
        }
        const auto fm = first_maximum(ts, es);
        if (!fm) return RampPoint{t_prime, 0.0, 0.0};
        return RampPoint{t_prime, fm->second, fm->first};
    };

    const RampPoint sudden = first_max_for(0.0);
    scan.sudden_first_max = sudden.first_max;
    scan.sudden_first_max_time = sudden.first_max_time;
    scan.points.resize(cfg.ramp_durations.size());
    parallel_for(static_cast<int>(cfg.ramp_durations.size()), cfg.threads,
                 [&](int i) { scan.points[i] = first_max_for(cfg.ramp_durations[i]); });
    scan.wall_seconds = now_seconds() - t0;
    return scan;
}

ScenarioResult run_decohere(const ScenarioConfig& cfg, CalibrationCache* cache) {
    cfg.validate();
    const double t0 = now_seconds();
    BathSpec bath = *cfg.bath;
    std::optional<CalibrationResult> calib;
    if (cfg.physical.has_value()) {
        const DimensionlessParams dim = to_dimensionless(cfg.physical->to_params());
        bath.temperature = dim.temperature;
        calib = calibrate_zeta_cached(cfg.physical->q_factor, bath.modes_per_oscillator,
                                      bath.cutoff, cache);
        bath.coupling = calib->zeta;
    }
    const auto times = cfg.grid.times();
    const auto states =
        decoherent_quench(cfg.chain, bath, cfg.chain.coupling, times, {cfg.site_a, cfg.site_b});
    std::vector<SeriesSample> series;
    series.reserve(times.size());
    for (std::size_t i = 0; i < times.size(); ++i)
        series.push_back(sample_from_pair_state(times[i], states[i], cfg.log_base));
    ScenarioResult r = result_from_series(std::move(series), cfg.log_base);
    r.calibration = calib;
    r.bath_temperature = bath.temperature;
    r.wall_seconds = now_seconds() - t0;
    return r;
}

ChannelResult run_channel(const ScenarioConfig& cfg) {
    cfg.validate();
    const double t0 = now_seconds();
    const int n = cfg.chain.n_sites;
    // kept mode is index 0 with unit frequency and no coupling; chain sites
    // are shifted to 1..n
    Mat v = Mat::Identity(n + 1, n + 1);
    v.bottomRightCorner(n, n) = build_potential(cfg.chain);

    Mat g0 = Mat::Identity(2 * (n + 1), 2 * (n + 1));
    const Covariance tms = two_mode_squeezed(cfg.squeezing);
    const int np = n + 1;
    const int idx[2] = {0, 1};  // kept mode, injection site
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            g0(idx[a], idx[b]) = tms.m(a, b);
            g0(idx[a], np + idx[b]) = tms.m(a, 2 + b);
            g0(np + idx[a], idx[b]) = tms.m(2 + a, b);
            g0(np + idx[a], np + idx[b]) = tms.m(2 + a, 2 + b);
        }
    }
    if (n > 1) {
        // remaining sites relax in the ground state of their own sub-chain
        ChainSpec sub = cfg.chain;
        sub.boundary = Boundary::open;
        sub.n_sites = n - 1;
        if (sub.n_sites >= 2) {
            const Covariance gsub = gibbs_state(build_potential(sub), 0.0);
            for (int a = 0; a < n - 1; ++a) {
                for (int b = 0; b < n - 1; ++b) {
                    g0(2 + a, 2 + b) = gsub.m(a, b);
                    g0(2 + a, np + 2 + b) = gsub.m(a, n - 1 + b);
                    g0(np + 2 + a, 2 + b) = gsub.m(n - 1 + a, b);
                    g0(np + 2 + a, np + 2 + b) = gsub.m(n - 1 + a, n - 1 + b);
                }
            }
        }
    }

    std::vector<int> tracked(n + 1);
    for (int i = 0; i <= n; ++i) tracked[i] = i;
    TrackedEvolver ev(v, Covariance(std::move(g0)), tracked);
    const auto times = cfg.grid.times();

    std::vector<std::vector<double>> en_series(n);  // per chain site
    for (auto& s : en_series) s.resize(times.size());
    ChannelResult res;
    res.last_site_series.reserve(times.size());
    const std::vector<int> part_a = {0};
    for (std::size_t it = 0; it < times.size(); ++it) {
        const Covariance all = ev.reduced_at(times[it]);
        for (int site = 1; site <= n; ++site) {
            const std::vector<int> pick = {0, site};
            const Covariance red = reduce(all, std::span<const int>(pick));
            const double en = log_negativity(red, std::span<const int>(part_a), cfg.log_base);
            en_series[site - 1][it] = en;
            if (site == n)
                res.last_site_series.push_back(sample_from_pair_state(times[it], red, cfg.log_base));
        }
    }
    res.sites.resize(n);
    res.arrivals.resize(n);
    std::vector<double> fit_x, fit_y;
    for (int site = 1; site <= n; ++site) {
        res.sites[site - 1] = site - 1;  // 0-based chain site label
        const auto t_arr = onset_time(times, en_series[site - 1]);
        res.arrivals[site - 1] =
            t_arr.has_value() ? *t_arr : std::numeric_limits<double>::quiet_NaN();
        if (site >= 2 && t_arr.has_value()) {
            fit_x.push_back(static_cast<double>(site));
            fit_y.push_back(*t_arr);
        }
    }
    if (fit_x.size() >= 2) res.fit = linear_fit(fit_x, fit_y);
    res.wall_seconds = now_seconds() - t0;
    return res;
}

FalloffResult run_falloff(const ScenarioConfig& cfg) {
    cfg.validate();
    const double t0 = now_seconds();
    const Mat v = build_potential(cfg.chain);
    const ModeBasis shared_basis(v);  // reused across distances via per-item evolvers
    const auto times = cfg.grid.times();

    FalloffResult res;
    res.rows.resize(cfg.falloff_distances.size());
    parallel_for(
        static_cast<int>(cfg.falloff_distances.size()), cfg.threads, [&](int i) {
            const int d = cfg.falloff_distances[i];
            TrackedEvolver ev(v, {0, d});
            std::vector<double> es(times.size());
            FalloffRow row{d, 0.0, 0.0, std::nullopt};
            const std::vector<int> part_a = {0};
            for (std::size_t it = 0; it < times.size(); ++it) {
                const Covariance red = ev.reduced_at(times[it]);
                es[it] = log_negativity(red, std::span<const int>(part_a), cfg.log_base);
                if (es[it] > row.peak) {
                    row.peak = es[it];
                    row.peak_time = times[it];
                }
            }
            row.onset = onset_time(times, es);
            res.rows[i] = row;
        });

    std::vector<double> lx, ly, ox, oy;
    for (const auto& row : res.rows) {
        if (row.peak > kOnsetEps) {
            lx.push_back(std::log(static_cast<double>(row.distance)));
            ly.push_back(std::log(row.peak));
        }
        if (row.distance >= 2 && row.distance <= 8 && row.onset.has_value()) {
            ox.push_back(static_cast<double>(row.distance));
            oy.push_back(*row.onset);
        }
    }
    if (lx.size() >= 2) res.loglog_fit = linear_fit(lx, ly);
    if (ox.size() >= 2) res.onset_fit = linear_fit(ox, oy);
    res.wall_seconds = now_seconds() - t0;
    return res;
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    if (count <= 0) return;
    const int workers = std::max(1, std::min(threads, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex err_mu;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mu);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qchain
