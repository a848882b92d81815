#include "qchain/decoherence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "qchain/dynamics.hpp"
#include "qchain/spectral.hpp"

namespace qchain {

namespace {

struct EnvelopeFit {
    double rate;
    double residual;
};

// Mean energy of the single system oscillator for the calibration
// preparation Gamma(0) = I + 2 e_{q0} e_{q0}^T, evaluated in the mode basis:
// Gamma(t) = S S^T + 2 (S e)(S e)^T needs only the site-0 mode weights.
class SingleSiteEnergy {
  public:
    explicit SingleSiteEnergy(const ModeBasis& basis) : omega_(basis.omega()) {
        const int n = basis.size();
        weight_.resize(n);
        for (int k = 0; k < n; ++k) {
            const double u = basis.vectors()(0, k);
            weight_(k) = u * u;
        }
    }

    double at(double t) const {
        const int n = static_cast<int>(omega_.size());
        double qq = 0.0, pp = 0.0, c00 = 0.0, s00 = 0.0;
        for (int k = 0; k < n; ++k) {
            const double w = omega_(k);
            const double c = std::cos(w * t), s = std::sin(w * t);
            qq += weight_(k) * (c * c + s * s / (w * w));
            pp += weight_(k) * (c * c + s * s * w * w);
            c00 += weight_(k) * c;
            s00 += weight_(k) * w * s;
        }
        return (qq + 2.0 * c00 * c00 + pp + 2.0 * s00 * s00) / 4.0;
    }

    double ground_energy() const {
        double e = 0.0;
        for (int k = 0; k < static_cast<int>(omega_.size()); ++k)
            e += weight_(k) * (omega_(k) + 1.0 / omega_(k));
        return e / 4.0;
    }

  private:
    Vec omega_;
    Vec weight_;
};

EnvelopeFit fit_decay_rate(double zeta, int modes, double cutoff, double window) {
    BathSpec bath{modes, cutoff, zeta, 0.0};
    const Mat v = augment_with_baths(Mat::Identity(1, 1), bath);
    const ModeBasis basis(v);
    const SingleSiteEnergy energy(basis);
    // The Gibbs floor stands in for the true quasi-stationary level; the
    // mismatch is O(dressing^2) and stays negligible while zeta^2 M <= 0.1
    // (the bisection bracket is capped accordingly).
    const double floor = energy.ground_energy();

    const double dt = 0.05;
    const int n_samples = static_cast<int>(window / dt) + 1;
    std::vector<double> ts, xs;
    ts.reserve(n_samples);
    xs.reserve(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double t = i * dt;
        ts.push_back(t);
        xs.push_back(energy.at(t) - floor);
    }
    // envelope: local maxima of the excess energy over the fast oscillation
    std::vector<double> mt, mx;
    for (int i = 1; i + 1 < n_samples; ++i) {
        if (xs[i] >= xs[i - 1] && xs[i] > xs[i + 1] && xs[i] > 0.0) {
            mt.push_back(ts[i]);
            mx.push_back(xs[i]);
        }
    }
    if (mt.size() < 8)
        throw StabilityError("calibration fit window too short: only " +
                             std::to_string(mt.size()) + " envelope maxima");
    // keep the tail out of the fit once it sinks toward the floor
    const double guard = 0.02 * mx.front();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    std::vector<std::pair<double, double>> kept;
    for (std::size_t i = 0; i < mt.size(); ++i) {
        if (mx[i] < guard) break;
        const double y = std::log(mx[i]);
        kept.emplace_back(mt[i], y);
        sx += mt[i];
        sy += y;
        sxx += mt[i] * mt[i];
        sxy += mt[i] * y;
        ++cnt;
    }
    const double denom = cnt * sxx - sx * sx;
    if (cnt < 8 || denom <= 0.0) throw StabilityError("calibration envelope fit is degenerate");
    const double slope = (cnt * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / cnt;
    double ss = 0.0;
    for (const auto& [t, y] : kept) {
        const double r = y - (slope * t + intercept);
        ss += r * r;
    }
    return EnvelopeFit{-slope, std::sqrt(ss / cnt)};
}

}  // namespace

CalibrationResult calibrate_zeta(double q_factor, int modes, double cutoff) {
    if (!(q_factor > 0.0)) throw ConfigError("Q factor must be > 0");
    if (std::isinf(q_factor)) return CalibrationResult{0.0, 0.0, 0.0};
    if (modes < 10)
        throw ConfigError("calibration needs at least 10 bath modes, got " + std::to_string(modes));
    if (!(cutoff > 0.0)) throw ConfigError("bath cutoff must be > 0");

    const double recurrence = 2.0 * std::numbers::pi * modes / cutoff;
    const double window = std::min(5.0 * q_factor, 0.8 * recurrence);
    const double target = 1.0 / q_factor;

    // flat Ohmic estimate: J(omega) ~ (pi/2) zeta^2 (M/Lambda) omega => rate = pi zeta^2 M / (2 Lambda)
    const double zeta0 = std::sqrt(2.0 * cutoff / (std::numbers::pi * modes * q_factor));
    // the envelope fit is reliable only while the bath dressing is weak;
    // beyond zeta^2 M = 0.1 the quasi-stationary floor drifts off the Gibbs
    // value and the fitted rate loses meaning (well before the Schur
    // stability bound zeta^2 M = 1)
    const double zeta_max = std::sqrt(0.1 / static_cast<double>(modes));
    double lo = zeta0 / 3.0;
    double hi = std::min(3.0 * zeta0, zeta_max);

    auto rate_at = [&](double z) { return fit_decay_rate(z, modes, cutoff, window); };

    EnvelopeFit flo = rate_at(lo);
    EnvelopeFit fhi = rate_at(hi);
    int expansions = 0;
    while (flo.rate > target && expansions < 6) {
        lo *= 0.5;
        flo = rate_at(lo);
        ++expansions;
    }
    while (fhi.rate < target && hi < zeta_max && expansions < 12) {
        hi = std::min(2.0 * hi, zeta_max);
        fhi = rate_at(hi);
        ++expansions;
    }
    if (flo.rate > target || fhi.rate < target)
        throw StabilityError("no coupling in the reliably fittable range (0, " +
                             std::to_string(zeta_max) + ") reproduces rate 1/Q = " +
                             std::to_string(target) + " (bracket rates " +
                             std::to_string(flo.rate) + ", " + std::to_string(fhi.rate) + ")");

    EnvelopeFit best_fit = fhi;
    double zbest = hi;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const EnvelopeFit fm = rate_at(mid);
        if (std::abs(fm.rate - target) < std::abs(best_fit.rate - target)) {
            best_fit = fm;
            zbest = mid;
        }
        if (std::abs(fm.rate - target) <= 3e-3 * target) break;
        if (fm.rate < target)
            lo = mid;
        else
            hi = mid;
        if ((hi - lo) < 1e-6 * zeta0) break;
    }
    return CalibrationResult{zbest, best_fit.rate, best_fit.residual};
}

Covariance coupled_gibbs_initial(const ChainSpec& chain, const BathSpec& bath) {
    ChainSpec pre = chain;
    pre.coupling = 0.0;  // pre-quench: oscillators uncoupled, baths attached
    const Mat v = augment_with_baths(build_potential(pre), bath);
    return gibbs_state(v, bath.temperature);
}

std::vector<Covariance> decoherent_quench(const ChainSpec& chain, const BathSpec& bath,
                                          double c_target, std::span<const double> times,
                                          std::pair<int, int> tracked) {
    chain.validate();
    bath.validate();
    double t_max = 0.0;
    for (double t : times) t_max = std::max(t_max, t);
    if (bath.modes_per_oscillator > 0 && t_max >= bath.recurrence_time())
        throw StabilityError(
            "horizon " + std::to_string(t_max) + " reaches the bath recurrence time " +
            std::to_string(bath.recurrence_time()) + "; need at least M = " +
            std::to_string(required_bath_modes(t_max, bath.cutoff)) + " bath modes");
    const Covariance g0 = coupled_gibbs_initial(chain, bath);
    const Mat v1 = augment_with_baths(build_potential(chain, c_target), bath);
    TrackedEvolver ev(v1, g0, {tracked.first, tracked.second});
    std::vector<Covariance> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(ev.reduced_at(t));
    return out;
}

CalibrationCache::CalibrationCache(std::string path) : path_(std::move(path)) {
    std::ifstream in(path_);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        Entry e;
        std::string version;
        if (ls >> e.q >> e.modes >> e.cutoff >> e.result.zeta >> e.result.fitted_rate >>
            e.result.fit_residual >> version) {
            if (version == kToolVersion) entries_.push_back(e);
        }
    }
}

std::optional<CalibrationResult> CalibrationCache::lookup(double q_factor, int modes,
                                                          double cutoff) const {
    for (const auto& e : entries_) {
        if (e.q == q_factor && e.modes == modes && e.cutoff == cutoff) return e.result;
    }
    return std::nullopt;
}

void CalibrationCache::store(double q_factor, int modes, double cutoff,
                             const CalibrationResult& r) {
    entries_.push_back(Entry{q_factor, cutoff, modes, r});
    std::ostringstream out;
    out.precision(17);
    for (const auto& e : entries_) {
        out << e.q << ' ' << e.modes << ' ' << e.cutoff << ' ' << e.result.zeta << ' '
            << e.result.fitted_rate << ' ' << e.result.fit_residual << ' ' << kToolVersion << '\n';
    }
    const std::string tmp = path_ + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        f << out.str();
    }
    std::rename(tmp.c_str(), path_.c_str());
}

CalibrationResult calibrate_zeta_cached(double q_factor, int modes, double cutoff,
                                        CalibrationCache* cache) {
    if (cache != nullptr) {
        if (auto hit = cache->lookup(q_factor, modes, cutoff)) return *hit;
    }
    const CalibrationResult r = calibrate_zeta(q_factor, modes, cutoff);
    if (cache != nullptr) cache->store(q_factor, modes, cutoff, r);
    return r;
}

}  // namespace qchain
