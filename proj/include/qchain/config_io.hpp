#pragma once

#include <string>

#include "qchain/scenario.hpp"

namespace qchain {

/// Parses the sectioned key-value scenario format. Unknown sections or keys,
/// missing required keys, and out-of-range values all raise ConfigError with
/// the offending [section].key path.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig parse_config_file(const std::string& path);

/// Canonical text form; parse(serialize(cfg)) reproduces cfg exactly.
/// With include_output = false the [output] section is omitted (that is the
/// physics-relevant form the run hash is taken over).
std::string serialize_config(const ScenarioConfig& cfg, bool include_output = true);

/// FNV-1a digest of the canonicalized physics config, as 16 hex chars.
std::string config_hash(const ScenarioConfig& cfg);

}  // namespace qchain
