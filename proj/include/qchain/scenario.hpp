#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qchain/chain.hpp"
#include "qchain/decoherence.hpp"
#include "qchain/dynamics.hpp"
#include "qchain/entanglement.hpp"
#include "qchain/units.hpp"

namespace qchain {

enum class ScenarioKind { quench, ramp_scan, decohere, channel, falloff, calibrate };

const char* to_string(ScenarioKind k);
ScenarioKind scenario_kind_from(const std::string& s);

struct TimeGrid {
    double t_end = 40.0;
    double dt_sample = 0.05;

    void validate() const;
    std::vector<double> times() const;  // 0, dt_sample, ..., <= t_end
};

/// Entanglement below this threshold counts as "not yet arrived".
inline constexpr double kOnsetEps = 1e-6;

/// Device parameters as they appear in config files (kept in file units so
/// serialization round-trips bit-exactly).
struct PhysicalInput {
    double frequency_ghz = 5.0;
    double temperature_mk = 10.0;
    double q_factor = 1000.0;

    PhysicalParams to_params() const {
        return PhysicalParams{frequency_ghz * 1e9, temperature_mk * 1e-3, q_factor};
    }
};

struct ScenarioConfig {
    ScenarioKind kind = ScenarioKind::quench;
    ChainSpec chain;
    std::vector<double> ramp_durations = {0.25, 0.5, 2.0, 5.0, 10.0, 20.0};  // scan grid
    std::optional<BathSpec> bath;
    std::optional<PhysicalInput> physical;
    int site_a = 0;  // 0-based internally; 1-based in config files
    int site_b = 1;
    TimeGrid grid;
    double rk_dt = kDefaultRampDt;
    double squeezing = 1.0;                  // channel input
    std::vector<int> falloff_distances = {2, 3, 4, 5, 6, 8, 12, 16, 24, 32};
    LogBase log_base = LogBase::two;
    std::string out_dir = "runs";
    int threads = 1;

    void validate() const;
};

struct SeriesSample {
    double t;
    double entanglement;      // E_N of the tracked pair
    double witness;           // EPR-variance lower bound
    double nu_min_pt;         // smallest partially transposed symplectic eigenvalue
    double validity_margin;   // smallest symplectic eigenvalue - 1
};

struct SeriesStats {
    std::optional<double> onset;
    double peak = 0.0;
    double peak_time = 0.0;
    std::optional<double> first_max;
    std::optional<double> first_max_time;
};

struct ScenarioResult {
    std::vector<SeriesSample> series;
    SeriesStats stats;
    double peak_base2 = 0.0;    // peak re-expressed in both bases
    double peak_natural = 0.0;
    std::optional<CalibrationResult> calibration;
    double bath_temperature = 0.0;
    double wall_seconds = 0.0;
};

/// First sample time with E_N > eps, linearly interpolated between samples.
std::optional<double> onset_time(std::span<const double> ts, std::span<const double> es,
                                 double eps = kOnsetEps);

/// First principal maximum: the first local maximum reaching at least `frac`
/// of the series maximum (precursor ripples near onset are not maxima of the
/// entanglement wave). Returns nullopt when the series never exceeds eps.
std::optional<std::pair<double, double>> first_maximum(std::span<const double> ts,
                                                       std::span<const double> es,
                                                       double eps = kOnsetEps, double frac = 0.5);

struct LinearFit {
    double slope;
    double intercept;
    double r_squared;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Sudden quench from the uncoupled ground state; entanglement series of the
/// tracked pair.
ScenarioResult run_quench(const ScenarioConfig& cfg);

struct RampPoint {
    double t_prime;
    double first_max;
    double first_max_time;
};

struct RampScanResult {
    double sudden_first_max;
    double sudden_first_max_time;
    std::vector<RampPoint> points;
    double wall_seconds = 0.0;
};

/// First-maximum entanglement versus switching time t'. Horizon per point is
/// t' + grid.t_end so the post-ramp wave is always contained.
RampScanResult run_ramp_scan(const ScenarioConfig& cfg);

/// Physical-parameter quench with baths: units -> calibration (cached) ->
/// coupled Gibbs initial state -> tracked evolution.
ScenarioResult run_decohere(const ScenarioConfig& cfg, CalibrationCache* cache);

struct ChannelResult {
    std::vector<int> sites;            // chain site labels, 0-based
    std::vector<double> arrivals;      // first time E_N(kept, site) > eps; NaN if never
    LinearFit fit;                     // over sites with distance >= 2 and finite arrival
    std::vector<SeriesSample> last_site_series;
    double wall_seconds = 0.0;
};

/// Half of a two-mode squeezed pair injected at site 1; arrival time of
/// entanglement between the kept mode and each chain site.
ChannelResult run_channel(const ScenarioConfig& cfg);

struct FalloffRow {
    int distance;
    double peak;
    double peak_time;
    std::optional<double> onset;
};

struct FalloffResult {
    std::vector<FalloffRow> rows;
    LinearFit loglog_fit;   // log(peak) vs log(distance)
    LinearFit onset_fit;    // onset vs distance, over distances 2..8
    double wall_seconds = 0.0;
};

/// Peak-over-time entanglement and onset versus site distance on a periodic
/// chain, via the tracked-moments path.
FalloffResult run_falloff(const ScenarioConfig& cfg);

/// Runs independent work items on up to `threads` workers; results must be
/// written by index so the outcome does not depend on scheduling.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace qchain
