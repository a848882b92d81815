#include "qchain/config_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace qchain {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string strip_comment(const std::string& s) {
    bool leading = true;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const char c = s[i];
        if (c == '#') return s.substr(0, i);
        if (c == ';' && leading) return s.substr(0, i);
        if (!std::isspace(static_cast<unsigned char>(c))) leading = false;
    }
    return s;
}

struct KvDocument {
    // (section, key) -> value; "" is the top-level section
    std::map<std::pair<std::string, std::string>, std::string> values;
    std::set<std::pair<std::string, std::string>> consumed;

    bool has(const std::string& sec, const std::string& key) const {
        return values.count({sec, key}) > 0;
    }
    const std::string* get(const std::string& sec, const std::string& key) {
        auto it = values.find({sec, key});
        if (it == values.end()) return nullptr;
        consumed.insert({sec, key});
        return &it->second;
    }
    void finish() const {
        for (const auto& [k, v] : values) {
            if (consumed.count(k) == 0) {
                const std::string where = k.first.empty() ? k.second : "[" + k.first + "]." + k.second;
                throw ConfigError("unknown key " + where);
            }
        }
    }
};

KvDocument lex(const std::string& text) {
    KvDocument doc;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (!doc.values.emplace(std::make_pair(section, key), value).second)
            throw ConfigError("duplicate key " + (section.empty() ? key : "[" + section + "]." + key));
    }
    return doc;
}

std::string path_of(const std::string& sec, const std::string& key) {
    return sec.empty() ? key : "[" + sec + "]." + key;
}

double parse_double(const std::string& sec, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(path_of(sec, key) + ": expected a number, got '" + v + "'");
    }
}

int parse_int(const std::string& sec, const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return static_cast<int>(x);
    } catch (const std::exception&) {
        throw ConfigError(path_of(sec, key) + ": expected an integer, got '" + v + "'");
    }
}

template <typename T, typename Parse>
std::vector<T> parse_list(const std::string& sec, const std::string& key, const std::string& v,
                          Parse parse) {
    std::vector<T> out;
    std::string item;
    std::istringstream in(v);
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ConfigError(path_of(sec, key) + ": empty list element");
        out.push_back(parse(sec, key, item));
    }
    if (out.empty()) throw ConfigError(path_of(sec, key) + ": list must be nonempty");
    return out;
}

class Reader {
  public:
    explicit Reader(KvDocument& doc) : doc_(doc) {}

    bool has_section(const std::string& sec) const {
        for (const auto& [k, v] : doc_.values)
            if (k.first == sec) return true;
        return false;
    }

    std::string require(const std::string& sec, const std::string& key) {
        const std::string* v = doc_.get(sec, key);
        if (v == nullptr) throw ConfigError("missing required key " + path_of(sec, key));
        return *v;
    }

    std::optional<std::string> optional(const std::string& sec, const std::string& key) {
        const std::string* v = doc_.get(sec, key);
        if (v == nullptr) return std::nullopt;
        return *v;
    }

    double number(const std::string& sec, const std::string& key, double fallback) {
        auto v = optional(sec, key);
        return v ? parse_double(sec, key, *v) : fallback;
    }
    double require_number(const std::string& sec, const std::string& key) {
        return parse_double(sec, key, require(sec, key));
    }
    int integer(const std::string& sec, const std::string& key, int fallback) {
        auto v = optional(sec, key);
        return v ? parse_int(sec, key, *v) : fallback;
    }
    int require_integer(const std::string& sec, const std::string& key) {
        return parse_int(sec, key, require(sec, key));
    }

  private:
    KvDocument& doc_;
};

void forbid_section(const Reader& r, const std::string& sec, ScenarioKind kind) {
    if (r.has_section(sec))
        throw ConfigError("[" + sec + "] does not apply to scenario '" +
                          std::string(to_string(kind)) + "'");
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
    KvDocument doc = lex(text);
    Reader r(doc);
    ScenarioConfig cfg;

    cfg.kind = scenario_kind_from(r.require("", "scenario"));

    if (auto v = r.optional("", "log_base")) {
        if (*v == "2")
            cfg.log_base = LogBase::two;
        else if (*v == "e")
            cfg.log_base = LogBase::natural;
        else
            throw ConfigError("log_base must be 2 or e, got '" + *v + "'");
    }
    cfg.threads = r.integer("", "threads", 1);

    cfg.chain.n_sites = r.require_integer("chain", "sites");
    cfg.chain.coupling = r.require_number("chain", "coupling");
    if (auto v = r.optional("chain", "boundary")) {
        if (*v == "periodic")
            cfg.chain.boundary = Boundary::periodic;
        else if (*v == "open")
            cfg.chain.boundary = Boundary::open;
        else
            throw ConfigError("[chain].boundary must be periodic or open, got '" + *v + "'");
    }
    if (auto v = r.optional("chain", "open_onsite")) {
        if (*v == "spring")
            cfg.chain.onsite = OnsiteForm::spring;
        else if (*v == "uniform")
            cfg.chain.onsite = OnsiteForm::uniform;
        else
            throw ConfigError("[chain].open_onsite must be spring or uniform, got '" + *v + "'");
    }
    cfg.chain.validate();

    const bool wants_pair = cfg.kind == ScenarioKind::quench ||
                            cfg.kind == ScenarioKind::ramp_scan ||
                            cfg.kind == ScenarioKind::decohere;
    if (wants_pair) {
        cfg.site_a = r.require_integer("pair", "site_a") - 1;  // file uses 1-based labels
        cfg.site_b = r.require_integer("pair", "site_b") - 1;
    } else {
        forbid_section(r, "pair", cfg.kind);
    }

    cfg.grid.t_end = r.number("time", "t_end", cfg.grid.t_end);
    cfg.grid.dt_sample = r.number("time", "dt_sample", cfg.grid.dt_sample);
    cfg.rk_dt = r.number("time", "dt", cfg.rk_dt);

    if (cfg.kind == ScenarioKind::ramp_scan) {
        if (auto v = r.optional("ramp", "durations"))
            cfg.ramp_durations = parse_list<double>("ramp", "durations", *v, parse_double);
    } else {
        forbid_section(r, "ramp", cfg.kind);
    }

    const bool wants_bath =
        cfg.kind == ScenarioKind::decohere || cfg.kind == ScenarioKind::calibrate;
    if (wants_bath) {
        BathSpec bath;
        bath.modes_per_oscillator = r.integer("bath", "modes", 300);
        bath.cutoff = r.number("bath", "cutoff", 5.0);
        bath.coupling = r.number("bath", "coupling", 0.0);
        bath.temperature = r.number("bath", "temperature", 0.0);
        bath.validate();
        cfg.bath = bath;
        if (r.has_section("physical")) {
            PhysicalInput phys;
            phys.frequency_ghz = r.require_number("physical", "frequency_ghz");
            phys.temperature_mk = r.require_number("physical", "temperature_mk");
            phys.q_factor = r.require_number("physical", "q_factor");
            phys.to_params().validate();
            cfg.physical = phys;
        }
    } else {
        forbid_section(r, "bath", cfg.kind);
        forbid_section(r, "physical", cfg.kind);
    }

    if (cfg.kind == ScenarioKind::channel) {
        cfg.squeezing = r.number("channel", "squeezing", 1.0);
        cfg.site_a = 0;
        cfg.site_b = cfg.chain.n_sites - 1;
    } else {
        forbid_section(r, "channel", cfg.kind);
    }

    if (cfg.kind == ScenarioKind::falloff) {
        if (auto v = r.optional("falloff", "distances"))
            cfg.falloff_distances = parse_list<int>("falloff", "distances", *v, parse_int);
        cfg.site_a = 0;
        cfg.site_b = cfg.falloff_distances.front();
    } else {
        forbid_section(r, "falloff", cfg.kind);
    }

    if (auto v = r.optional("output", "dir")) cfg.out_dir = *v;

    doc.finish();
    cfg.validate();
    return cfg;
}

ScenarioConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

namespace {

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

std::string serialize_config(const ScenarioConfig& cfg, bool include_output) {
    std::ostringstream out;
    out << "scenario = " << to_string(cfg.kind) << "\n";
    out << "log_base = " << (cfg.log_base == LogBase::two ? "2" : "e") << "\n";
    out << "threads = " << cfg.threads << "\n";
    out << "\n[chain]\n";
    out << "sites = " << cfg.chain.n_sites << "\n";
    out << "coupling = " << fmt(cfg.chain.coupling) << "\n";
    out << "boundary = " << (cfg.chain.boundary == Boundary::periodic ? "periodic" : "open")
        << "\n";
    out << "open_onsite = " << (cfg.chain.onsite == OnsiteForm::spring ? "spring" : "uniform")
        << "\n";
    const bool wants_pair = cfg.kind == ScenarioKind::quench ||
                            cfg.kind == ScenarioKind::ramp_scan ||
                            cfg.kind == ScenarioKind::decohere;
    if (wants_pair) {
        out << "\n[pair]\n";
        out << "site_a = " << cfg.site_a + 1 << "\n";
        out << "site_b = " << cfg.site_b + 1 << "\n";
    }
    out << "\n[time]\n";
    out << "t_end = " << fmt(cfg.grid.t_end) << "\n";
    out << "dt_sample = " << fmt(cfg.grid.dt_sample) << "\n";
    out << "dt = " << fmt(cfg.rk_dt) << "\n";
    if (cfg.kind == ScenarioKind::ramp_scan) {
        out << "\n[ramp]\ndurations = ";
        for (std::size_t i = 0; i < cfg.ramp_durations.size(); ++i)
            out << (i ? ", " : "") << fmt(cfg.ramp_durations[i]);
        out << "\n";
    }
    if (cfg.bath.has_value()) {
        out << "\n[bath]\n";
        out << "modes = " << cfg.bath->modes_per_oscillator << "\n";
        out << "cutoff = " << fmt(cfg.bath->cutoff) << "\n";
        out << "coupling = " << fmt(cfg.bath->coupling) << "\n";
        out << "temperature = " << fmt(cfg.bath->temperature) << "\n";
    }
    if (cfg.physical.has_value()) {
        out << "\n[physical]\n";
        out << "frequency_ghz = " << fmt(cfg.physical->frequency_ghz) << "\n";
        out << "temperature_mk = " << fmt(cfg.physical->temperature_mk) << "\n";
        out << "q_factor = " << fmt(cfg.physical->q_factor) << "\n";
    }
    if (cfg.kind == ScenarioKind::channel) {
        out << "\n[channel]\nsqueezing = " << fmt(cfg.squeezing) << "\n";
    }
    if (cfg.kind == ScenarioKind::falloff) {
        out << "\n[falloff]\ndistances = ";
        for (std::size_t i = 0; i < cfg.falloff_distances.size(); ++i)
            out << (i ? ", " : "") << cfg.falloff_distances[i];
        out << "\n";
    }
    if (include_output) {
        out << "\n[output]\ndir = " << cfg.out_dir << "\n";
    }
    return out.str();
}

std::string config_hash(const ScenarioConfig& cfg) {
    const std::string canon = serialize_config(cfg, /*include_output=*/false);
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace qchain
