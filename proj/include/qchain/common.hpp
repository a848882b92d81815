#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace qchain {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline constexpr const char* kToolVersion = "0.1.0";

// CLI exit codes
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitPhysicsError = 3;
inline constexpr int kExitStabilityError = 4;

/// Malformed or out-of-range configuration input.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A physical invariant (uncertainty relation, symplecticity, ...) was violated.
struct PhysicsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Unstable or under-resolved model setup (bath recurrence, non-PD potential, step size).
struct StabilityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace qchain
