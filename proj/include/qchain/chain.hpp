#pragma once

#include <cmath>

#include "qchain/common.hpp"

namespace qchain {

enum class Boundary { periodic, open };

/// On-site coefficient convention for open-chain end sites: the spring form
/// c*sum_k (q_k - q_{k+1})^2 gives end sites 1+c; the uniform alternative
/// keeps 1+2c on every site.
enum class OnsiteForm { spring, uniform };

struct ChainSpec {
    int n_sites = 2;
    double coupling = 0.0;  // dimensionless c >= 0
    Boundary boundary = Boundary::periodic;
    OnsiteForm onsite = OnsiteForm::spring;

    void validate() const;
};

/// Per-oscillator discrete Ohmic bath: M modes at frequencies i*cutoff/M,
/// i = 1..M, each coupled to its oscillator's position with strength
/// coupling * frequency (linear spectral weight).
struct BathSpec {
    int modes_per_oscillator = 0;  // M
    double cutoff = 5.0;           // Lambda, dimensionless frequency
    double coupling = 0.0;         // zeta >= 0
    double temperature = 0.0;      // dimensionless k_B T / (hbar omega)

    void validate() const;
    /// Time at which the finite bath feeds energy back: 2*pi*M/Lambda.
    double recurrence_time() const;
};

/// Smallest M whose recurrence time exceeds the horizon.
int required_bath_modes(double t_end, double cutoff);

/// Potential matrix of the chain Hamiltonian H = (1/2) (p^T p + q^T V q),
/// with the given coupling value (which may differ from spec.coupling during
/// a ramp). Unit masses, dimensionless units. Exactly symmetric, positive
/// definite.
Mat build_potential(const ChainSpec& spec, double c_value);
inline Mat build_potential(const ChainSpec& spec) { return build_potential(spec, spec.coupling); }

/// Normal-mode frequency omega_k = sqrt(1 + 4c sin^2(pi k / N)), k = 1..N.
/// Periodic chains only.
double dispersion(const ChainSpec& spec, int mode_index);

/// Block potential over N system modes followed by N*M bath modes
/// (oscillator j's modes occupy indices N + j*M .. N + (j+1)*M - 1).
/// Throws StabilityError when the coupling destabilizes the joint potential.
Mat augment_with_baths(const Mat& v_sys, const BathSpec& bath);

}  // namespace qchain
