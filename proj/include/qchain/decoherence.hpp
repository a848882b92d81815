#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qchain/chain.hpp"
#include "qchain/covariance.hpp"

namespace qchain {

struct CalibrationResult {
    double zeta;
    double fitted_rate;
    double fit_residual;  // RMS of the log-envelope fit
};

/// Finds the system-bath coupling zeta such that a single oscillator coupled
/// to one bath (M modes, cutoff Lambda) at T=0, prepared with excess energy,
/// loses mean energy at rate 1/Q. Bisection on zeta; the objective is the
/// log-linear fit to the energy envelope (local maxima over the fast
/// oscillation). Q = +inf returns zeta = 0.
CalibrationResult calibrate_zeta(double q_factor, int modes, double cutoff);

/// Pre-quench equilibrium: Gibbs state of the uncoupled chain with its baths
/// attached (the joint system thermalizes before the coupling is switched).
Covariance coupled_gibbs_initial(const ChainSpec& chain, const BathSpec& bath);

/// Sudden switch of the chain coupling to c_target at t=0 with baths held
/// fixed; returns the reduced covariance series of the tracked pair.
/// Throws StabilityError when the horizon reaches the bath recurrence time.
std::vector<Covariance> decoherent_quench(const ChainSpec& chain, const BathSpec& bath,
                                          double c_target, std::span<const double> times,
                                          std::pair<int, int> tracked);

/// Plain-text calibration table keyed by (Q, M, Lambda); entries from other
/// tool versions are ignored (the fitted rate depends on fit details).
class CalibrationCache {
  public:
    explicit CalibrationCache(std::string path);

    std::optional<CalibrationResult> lookup(double q_factor, int modes, double cutoff) const;
    void store(double q_factor, int modes, double cutoff, const CalibrationResult& r);

    const std::string& path() const { return path_; }

  private:
    struct Entry {
        double q, cutoff;
        int modes;
        CalibrationResult result;
    };
    std::string path_;
    std::vector<Entry> entries_;
};

/// Calibrate with cache assist (cache may be null).
CalibrationResult calibrate_zeta_cached(double q_factor, int modes, double cutoff,
                                        CalibrationCache* cache);

}  // namespace qchain
