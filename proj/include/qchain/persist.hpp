#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "qchain/scenario.hpp"

namespace qchain {

/// Write-temp-then-rename; parent directories must exist.
void write_text_atomic(const std::string& path, const std::string& content);

/// CSV with header t,E_N,witness,nu_min_pt,validity_margin; every float at
/// 17 significant digits, LF line endings. Byte-identical for identical data.
std::string series_to_csv(const std::vector<SeriesSample>& series);
void write_series(const std::string& path, const std::vector<SeriesSample>& series);

/// One run directory per invocation: <out>/<scenario>-<hash8>-<timestamp>.
std::string make_run_dir(const std::string& out_root, const ScenarioConfig& cfg);

nlohmann::json tolerances_json();
nlohmann::json summary_json(const ScenarioConfig& cfg, const ScenarioResult& result);

struct RunManifest {
    std::string config_hash;
    std::string tool_version;
    std::string started;
    std::string finished;
    std::vector<std::string> outputs;
};
void write_manifest(const std::string& run_dir, const RunManifest& manifest);

std::string iso_timestamp_now();

}  // namespace qchain
