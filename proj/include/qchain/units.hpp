#pragma once

#include "qchain/common.hpp"

namespace qchain {

// SI exact values
inline constexpr double kBoltzmann = 1.380649e-23;  // J/K
inline constexpr double kPlanck = 6.62607015e-34;   // J s

struct PhysicalParams {
    double frequency_hz = 0.0;   // fundamental frequency f, omega = 2 pi f
    double temperature_k = 0.0;
    double q_factor = 0.0;

    void validate() const;
};

struct DimensionlessParams {
    double temperature;        // k_B T / (hbar omega) = k_B T / (h f)
    double damping_rate;       // 1/Q per unit dimensionless time
    double time_unit_seconds;  // 1/(2 pi f)
};

DimensionlessParams to_dimensionless(const PhysicalParams& p);
PhysicalParams from_dimensionless(const DimensionlessParams& d);

}  // namespace qchain
