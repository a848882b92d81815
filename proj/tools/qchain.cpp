// qchain - entanglement dynamics of coupled oscillator chains at the
// covariance-matrix level. Subcommands run the scenario described by a
// config file and persist CSV series plus a JSON summary per run.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qchain/config_io.hpp"
#include "qchain/kernels.hpp"
#include "qchain/persist.hpp"
#include "qchain/validate.hpp"

using nlohmann::json;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<double> dt;
    std::optional<double> t_end;
    std::optional<std::string> log_base;
    std::optional<int> threads;
};

qchain::ScenarioConfig load_config(const GlobalOpts& g, qchain::ScenarioKind expected) {
    if (g.config_path.empty()) throw qchain::ConfigError("--config is required");
    qchain::ScenarioConfig cfg = qchain::parse_config_file(g.config_path);
    if (cfg.kind != expected)
        throw qchain::ConfigError(std::string("config declares scenario '") +
                                  qchain::to_string(cfg.kind) + "' but the subcommand expects '" +
                                  qchain::to_string(expected) + "'");
    if (g.out_dir) cfg.out_dir = *g.out_dir;
    if (g.dt) cfg.rk_dt = *g.dt;
    if (g.t_end) cfg.grid.t_end = *g.t_end;
    if (g.threads) cfg.threads = *g.threads;
    if (g.log_base) {
        if (*g.log_base == "2")
            cfg.log_base = qchain::LogBase::two;
        else if (*g.log_base == "e")
            cfg.log_base = qchain::LogBase::natural;
        else
            throw qchain::ConfigError("--log-base must be 2 or e");
    }
    cfg.validate();
    return cfg;
}

void print_series_stats(const qchain::ScenarioResult& r) {
    if (r.stats.onset)
        std::printf("onset time        : %.6g\n", *r.stats.onset);
    else
        std::printf("onset time        : never\n");
    std::printf("peak E_N          : %.9g at t = %.6g\n", r.stats.peak, r.stats.peak_time);
    std::printf("peak (base 2)     : %.9g\n", r.peak_base2);
    std::printf("peak (natural)    : %.9g\n", r.peak_natural);
    if (r.stats.first_max)
        std::printf("first maximum     : %.9g at t = %.6g\n", *r.stats.first_max,
                    *r.stats.first_max_time);
}

std::string finish_run(const qchain::ScenarioConfig& cfg, const std::string& started,
                       const std::vector<std::pair<std::string, std::string>>& files) {
    const std::string dir = qchain::make_run_dir(cfg.out_dir, cfg);
    qchain::RunManifest manifest;
    manifest.config_hash = qchain::config_hash(cfg);
    manifest.tool_version = qchain::kToolVersion;
    manifest.started = started;
    for (const auto& [name, content] : files) {
        qchain::write_text_atomic(dir + "/" + name, content);
        manifest.outputs.push_back(name);
    }
    manifest.outputs.push_back("manifest.json");
    manifest.finished = qchain::iso_timestamp_now();
    qchain::write_manifest(dir, manifest);
    std::printf("run directory     : %s\n", dir.c_str());
    return dir;
}

int run_quench_cmd(const GlobalOpts& g) {
    const std::string started = qchain::iso_timestamp_now();
    const auto cfg = load_config(g, qchain::ScenarioKind::quench);
    const auto r = qchain::run_quench(cfg);
    print_series_stats(r);
    finish_run(cfg, started,
               {{"series.csv", qchain::series_to_csv(r.series)},
                {"summary.json", qchain::summary_json(cfg, r).dump(2) + "\n"}});
    return 0;
}

int run_ramp_cmd(const GlobalOpts& g) {
    const std::string started = qchain::iso_timestamp_now();
    const auto cfg = load_config(g, qchain::ScenarioKind::ramp_scan);
    const auto scan = qchain::run_ramp_scan(cfg);
    std::printf("sudden first max  : %.9g at t = %.6g\n", scan.sudden_first_max,
                scan.sudden_first_max_time);
    std::string csv = "t_prime,first_max,first_max_time\n";
    char buf[128];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", 0.0, scan.sudden_first_max,
                  scan.sudden_first_max_time);
    csv += buf;
    for (const auto& p : scan.points) {
        std::printf("t' = %-8.4g first max %.9g (%.3f of sudden)\n", p.t_prime, p.first_max,
                    scan.sudden_first_max > 0 ? p.first_max / scan.sudden_first_max : 0.0);
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", p.t_prime, p.first_max,
                      p.first_max_time);
        csv += buf;
    }
    json j;
    j["tool_version"] = qchain::kToolVersion;
    j["config_hash"] = qchain::config_hash(cfg);
    j["config"] = qchain::serialize_config(cfg);
    j["sudden_first_max"] = scan.sudden_first_max;
    j["wall_seconds"] = scan.wall_seconds;
    finish_run(cfg, started, {{"ramp_scan.csv", csv}, {"summary.json", j.dump(2) + "\n"}});
    return 0;
}

int run_decohere_cmd(const GlobalOpts& g, const std::string& cache_path) {
    const std::string started = qchain::iso_timestamp_now();
    const auto cfg = load_config(g, qchain::ScenarioKind::decohere);
    qchain::CalibrationCache cache(cache_path.empty() ? cfg.out_dir + "/calibration_cache.txt"
                                                      : cache_path);
    const auto r = qchain::run_decohere(cfg, &cache);
    if (r.calibration)
        std::printf("calibrated zeta   : %.9g (fitted rate %.6g)\n", r.calibration->zeta,
                    r.calibration->fitted_rate);
    std::printf("bath temperature  : %.6g (dimensionless)\n", r.bath_temperature);
    print_series_stats(r);
    finish_run(cfg, started,
               {{"series.csv", qchain::series_to_csv(r.series)},
                {"summary.json", qchain::summary_json(cfg, r).dump(2) + "\n"}});
    return 0;
}

int run_channel_cmd(const GlobalOpts& g) {
    const std::string started = qchain::iso_timestamp_now();
    const auto cfg = load_config(g, qchain::ScenarioKind::channel);
    const auto r = qchain::run_channel(cfg);
    std::string csv = "site,arrival_time\n";
    char buf[96];
    for (std::size_t i = 0; i < r.sites.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%d,%.17g\n", r.sites[i] + 1, r.arrivals[i]);
        csv += buf;
        std::printf("site %2d arrival   : %.6g\n", r.sites[i] + 1, r.arrivals[i]);
    }
    std::printf("linear fit        : t1 = %.4g n %+.4g  (R^2 = %.4f)\n", r.fit.slope,
                r.fit.intercept, r.fit.r_squared);
    json j;
    j["tool_version"] = qchain::kToolVersion;
    j["config_hash"] = qchain::config_hash(cfg);
    j["config"] = qchain::serialize_config(cfg);
    j["fit"] = {{"slope", r.fit.slope}, {"intercept", r.fit.intercept}, {"r2", r.fit.r_squared}};
    j["wall_seconds"] = r.wall_seconds;
    finish_run(cfg, started,
               {{"arrivals.csv", csv},
                {"last_site_series.csv", qchain::series_to_csv(r.last_site_series)},
                {"summary.json", j.dump(2) + "\n"}});
    return 0;
}

int run_falloff_cmd(const GlobalOpts& g) {
    const std::string started = qchain::iso_timestamp_now();
    const auto cfg = load_config(g, qchain::ScenarioKind::falloff);
    const auto r = qchain::run_falloff(cfg);
    std::string csv = "distance,peak,peak_time,onset\n";
    char buf[160];
    for (const auto& row : r.rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g\n", row.distance, row.peak,
                      row.peak_time, row.onset.value_or(std::nan("")));
        csv += buf;
        std::printf("d = %-3d peak %.6g at t = %-8.4g onset %.6g\n", row.distance, row.peak,
                    row.peak_time, row.onset.value_or(std::nan("")));
    }
    std::printf("log-log slope     : %.4f (R^2 = %.4f)\n", r.loglog_fit.slope,
                r.loglog_fit.r_squared);
    std::printf("onset fit         : slope %.4f R^2 = %.4f\n", r.onset_fit.slope,
                r.onset_fit.r_squared);
    json j;
    j["tool_version"] = qchain::kToolVersion;
    j["config_hash"] = qchain::config_hash(cfg);
    j["config"] = qchain::serialize_config(cfg);
    j["loglog_slope"] = r.loglog_fit.slope;
    j["onset_fit"] = {{"slope", r.onset_fit.slope}, {"r2", r.onset_fit.r_squared}};
    j["wall_seconds"] = r.wall_seconds;
    finish_run(cfg, started, {{"falloff.csv", csv}, {"summary.json", j.dump(2) + "\n"}});
    return 0;
}

int run_calibrate_cmd(const GlobalOpts& g, const std::string& cache_path) {
    const auto cfg = load_config(g, qchain::ScenarioKind::calibrate);
    if (!cfg.physical) throw qchain::ConfigError("calibrate requires a [physical] section");
    qchain::CalibrationCache cache(cache_path.empty() ? cfg.out_dir + "/calibration_cache.txt"
                                                      : cache_path);
    const auto r = qchain::calibrate_zeta_cached(cfg.physical->q_factor,
                                                 cfg.bath->modes_per_oscillator,
                                                 cfg.bath->cutoff, &cache);
    std::printf("Q = %g, M = %d, Lambda = %g\n", cfg.physical->q_factor,
                cfg.bath->modes_per_oscillator, cfg.bath->cutoff);
    std::printf("zeta              : %.9g\n", r.zeta);
    std::printf("fitted decay rate : %.9g (target %.9g)\n", r.fitted_rate,
                1.0 / cfg.physical->q_factor);
    std::printf("fit residual      : %.3g\n", r.fit_residual);
    std::printf("cache             : %s\n", cache.path().c_str());
    return 0;
}

int run_validate_cmd() {
    const auto checks = qchain::run_validation_suite();
    bool all_ok = true;
    for (const auto& c : checks) {
        std::printf("[%s] %-28s %s\n", c.ok ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
        all_ok = all_ok && c.ok;
    }
    return all_ok ? 0 : qchain::kExitPhysicsError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"entanglement dynamics of coupled oscillator chains"};
    app.set_version_flag("--version", std::string(qchain::kToolVersion));

    GlobalOpts g;
    std::string cache_path;
    app.add_option("--config", g.config_path, "scenario config file");
    std::string out_dir_opt, log_base_opt;
    double dt_opt = 0, t_end_opt = 0;
    int threads_opt = 0;
    auto* o1 = app.add_option("--out", out_dir_opt, "output root directory");
    auto* o2 = app.add_option("--dt", dt_opt, "integrator step for ramped evolution");
    auto* o3 = app.add_option("--t-end", t_end_opt, "sampling horizon");
    auto* o4 = app.add_option("--log-base", log_base_opt, "entanglement log base (2 or e)")
                   ->check(CLI::IsMember({"2", "e"}));
    auto* o5 = app.add_option("--threads", threads_opt, "parallel workers for scan points");
    app.add_option("--cache", cache_path, "calibration cache file");

    app.require_subcommand(1);
    auto* quench = app.add_subcommand("quench", "sudden quench from the uncoupled ground state");
    auto* ramp = app.add_subcommand("ramp-scan", "first-maximum entanglement vs switching time");
    auto* decohere = app.add_subcommand("decohere", "quench with Ohmic baths at device parameters");
    auto* channel = app.add_subcommand("channel", "entanglement transport from an injected pair");
    auto* falloff = app.add_subcommand("falloff", "peak entanglement vs site distance");
    auto* calibrate = app.add_subcommand("calibrate", "fit the bath coupling to a Q factor");
    auto* validate = app.add_subcommand("validate", "run the physical invariant self-checks");
    // global flags may follow the subcommand name
    for (auto* sub : {quench, ramp, decohere, channel, falloff, calibrate, validate})
        sub->fallthrough();

    try {
        app.parse(argc, argv);
        if (o1->count()) g.out_dir = out_dir_opt;
        if (o2->count()) g.dt = dt_opt;
        if (o3->count()) g.t_end = t_end_opt;
        if (o4->count()) g.log_base = log_base_opt;
        if (o5->count()) g.threads = threads_opt;

        if (validate->parsed()) return run_validate_cmd();
        if (quench->parsed()) return run_quench_cmd(g);
        if (ramp->parsed()) return run_ramp_cmd(g);
        if (decohere->parsed()) return run_decohere_cmd(g, cache_path);
        if (channel->parsed()) return run_channel_cmd(g);
        if (falloff->parsed()) return run_falloff_cmd(g);
        if (calibrate->parsed()) return run_calibrate_cmd(g, cache_path);
        return 1;
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const qchain::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return qchain::kExitConfigError;
    } catch (const qchain::StabilityError& e) {
        std::fprintf(stderr, "stability error: %s\n", e.what());
        return qchain::kExitStabilityError;
    } catch (const qchain::PhysicsError& e) {
        std::fprintf(stderr, "physics error: %s\n", e.what());
        return qchain::kExitPhysicsError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
