#pragma once

#include <memory>
#include <span>
#include <vector>

#include "qchain/chain.hpp"
#include "qchain/covariance.hpp"
#include "qchain/spectral.hpp"

namespace qchain {

/// Exact flow of (q; p) under H = (p^T p + q^T V q)/2:
/// S(t) = [[cos Wt, W^-1 sin Wt], [-W sin Wt, cos Wt]], W = V^(1/2).
struct Propagator {
    Mat s;
    int modes() const { return static_cast<int>(s.rows()) / 2; }
};

Propagator propagator(const ModeBasis& basis, double t);
Propagator propagator(const Mat& v, double t);

/// max |S sigma S^T - sigma|
double symplectic_defect(const Propagator& p);

/// Gamma -> S Gamma S^T, symmetrized.
Covariance evolve(const Covariance& g0, const Propagator& p);

/// The propagation functions of the periodic chain,
///   f_k(t) = (1/N) sum_l cos(2 pi k l / N) cos(omega_l t)
///   g_k(t) = (1/N) sum_l cos(2 pi k l / N) sin(omega_l t) / omega_l
/// indexed k = 0..N-1; f(0) = (1,0,...,0), g(0) = 0.
struct FgFunctions {
    Vec f, g;
};
FgFunctions fg_functions(const ChainSpec& spec, double t);

/// Covariance of the quenched vacuum at time t assembled from circular lag
/// sums of f, g and their time derivatives. Independent of the spectral
/// propagator route; the two must agree.
Covariance fg_covariance(const ChainSpec& spec, double t);

enum class RampKind { sudden, linear };

/// Time dependence of the coupling: c(t) = target * min(t/duration, 1)
/// for a linear ramp, or an instantaneous switch when sudden.
struct RampSchedule {
    RampKind kind = RampKind::sudden;
    double duration = 0.0;  // t', units 1/omega
    double target_coupling = 0.0;

    void validate() const;
    double coupling_at(double t) const;
};

struct TrajectorySample {
    double t;
    Covariance state;
};

inline constexpr double kDefaultRampDt = 1e-3;

/// Integrates dGamma/dt = A(t) Gamma + Gamma A(t)^T with
/// A(t) = [[0, I], [-V(c(t)), 0]] by classical RK4 while the ramp is active,
/// then switches to the exact spectral propagator of the final potential.
/// Samples are symmetrized and validity-checked; a symplectic-purity drift
/// beyond 1e-6 raises StabilityError suggesting a smaller dt.
std::vector<TrajectorySample> evolve_ramp(const Covariance& g0, const ChainSpec& spec,
                                          const RampSchedule& schedule, double dt, double t_end,
                                          double dt_sample);

/// Evolves only the rows of S(t) needed for a fixed set of tracked sites:
/// O(n^2) per sample instead of O(n^3), entrywise equal to
/// reduce(evolve(g0, S(t)), sites).
class TrackedEvolver {
  public:
    /// Vacuum initial state.
    TrackedEvolver(const Mat& v, std::vector<int> sites);
    /// General initial state (copied; may be large for bath-augmented runs).
    TrackedEvolver(const Mat& v, Covariance g0, std::vector<int> sites);

    const ModeBasis& basis() const { return basis_; }
    const std::vector<int>& sites() const { return sites_; }

    /// 2k x 2k reduced covariance of the tracked sites at time t.
    Covariance reduced_at(double t) const;

  private:
    ModeBasis basis_;
    std::vector<int> sites_;
    Mat g0_;            // empty when the initial state is the vacuum
    bool identity_g0_;
};

std::vector<Covariance> tracked_moments(const Mat& v, const Covariance& g0,
                                        std::span<const int> sites,
                                        std::span<const double> times);

}  // namespace qchain
