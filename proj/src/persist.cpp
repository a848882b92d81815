#include "qchain/persist.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qchain/config_io.hpp"

namespace qchain {

namespace fs = std::filesystem;
using nlohmann::json;

void write_text_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("cannot write '" + tmp + "'");
        out << content;
        if (!out) throw ConfigError("write failed for '" + tmp + "'");
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw ConfigError("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

namespace {
void append_g17(std::string& out, double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out += buf;
}
}  // namespace

std::string series_to_csv(const std::vector<SeriesSample>& series) {
    std::string out = "t,E_N,witness,nu_min_pt,validity_margin\n";
    for (const auto& s : series) {
        append_g17(out, s.t);
        out += ',';
        append_g17(out, s.entanglement);
        out += ',';
        append_g17(out, s.witness);
        out += ',';
        append_g17(out, s.nu_min_pt);
        out += ',';
        append_g17(out, s.validity_margin);
        out += '\n';
    }
    return out;
}

void write_series(const std::string& path, const std::vector<SeriesSample>& series) {
    write_text_atomic(path, series_to_csv(series));
}

std::string iso_timestamp_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        now.time_since_epoch()).count() % 1000;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d%02d%02dT%02d%02d%02d.%03dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                  static_cast<int>(ms));
    return buf;
}

std::string make_run_dir(const std::string& out_root, const ScenarioConfig& cfg) {
    const std::string hash8 = config_hash(cfg).substr(0, 8);
    std::string dir = out_root + "/" + to_string(cfg.kind) + "-" + hash8 + "-" +
                      iso_timestamp_now();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create run directory '" + dir + "': " + ec.message());
    return dir;
}

json tolerances_json() {
    return json{{"validity", kValidityTol},
                {"nu_clamp", kNuClamp},
                {"onset_eps", kOnsetEps},
                {"symplectic_defect", 1e-10}};
}

json summary_json(const ScenarioConfig& cfg, const ScenarioResult& result) {
    json j;
    j["tool_version"] = kToolVersion;
    j["config_hash"] = config_hash(cfg);
    j["config"] = serialize_config(cfg);
    j["log_base"] = cfg.log_base == LogBase::two ? "2" : "e";
    j["tolerances"] = tolerances_json();
    if (result.stats.onset.has_value()) j["onset_time"] = *result.stats.onset;
    j["peak"] = result.stats.peak;
    j["peak_time"] = result.stats.peak_time;
    j["peak_base2"] = result.peak_base2;
    j["peak_natural"] = result.peak_natural;
    if (result.stats.first_max.has_value()) {
        j["first_max"] = *result.stats.first_max;
        j["first_max_time"] = *result.stats.first_max_time;
    }
    if (result.calibration.has_value()) {
        j["calibration"] = {{"zeta", result.calibration->zeta},
                            {"fitted_rate", result.calibration->fitted_rate},
                            {"fit_residual", result.calibration->fit_residual}};
        j["bath_temperature"] = result.bath_temperature;
    }
    j["wall_seconds"] = result.wall_seconds;
    return j;
}

void write_manifest(const std::string& run_dir, const RunManifest& manifest) {
    json j{{"config_hash", manifest.config_hash},
           {"tool_version", manifest.tool_version},
           {"tolerances", tolerances_json()},
           {"started", manifest.started},
           {"finished", manifest.finished},
           {"outputs", manifest.outputs}};
    write_text_atomic(run_dir + "/manifest.json", j.dump(2) + "\n");
}

}  // namespace qchain
