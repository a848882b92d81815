#include "qchain/units.hpp"

#include <numbers>

namespace qchain {

void PhysicalParams::validate() const {
    if (!(frequency_hz > 0.0)) throw ConfigError("physical.frequency must be > 0");
    if (!(temperature_k > 0.0)) throw ConfigError("physical.temperature must be > 0");
    if (!(q_factor > 0.0)) throw ConfigError("physical.q_factor must be > 0");
}

DimensionlessParams to_dimensionless(const PhysicalParams& p) {
    p.validate();
    return DimensionlessParams{
        kBoltzmann * p.temperature_k / (kPlanck * p.frequency_hz),
        1.0 / p.q_factor,
        1.0 / (2.0 * std::numbers::pi * p.frequency_hz),
    };
}

PhysicalParams from_dimensionless(const DimensionlessParams& d) {
    if (!(d.time_unit_seconds > 0.0) || !(d.damping_rate > 0.0) || !(d.temperature > 0.0))
        throw ConfigError("dimensionless parameters must be positive to invert");
    PhysicalParams p;
    p.frequency_hz = 1.0 / (2.0 * std::numbers::pi * d.time_unit_seconds);
    p.temperature_k = d.temperature * kPlanck * p.frequency_hz / kBoltzmann;
    p.q_factor = 1.0 / d.damping_rate;
    return p;
}

}  // namespace qchain
