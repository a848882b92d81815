#pragma once

#include <span>

#include "qchain/covariance.hpp"

namespace qchain {

enum class LogBase { two, natural };

inline double log_in_base(double x, LogBase base) {
    return base == LogBase::two ? std::log2(x) : std::log(x);
}

/// Symplectic eigenvalues below 1 by less than this are eigensolver noise
/// and are clamped to 1 before taking logs.
inline constexpr double kNuClamp = 1e-8;

/// Symplectic spectrum of Gamma, ascending, one entry per mode. Computed
/// through the real symmetric problem on K = Gamma^(1/2) sigma Gamma^(1/2):
/// the eigenvalues of -K^2 are the nu^2, each doubled. Throws PhysicsError
/// when Gamma is not positive semidefinite.
Vec symplectic_eigenvalues(const Covariance& g);

/// Momentum-sign flip on subsystem A (partial transposition at the
/// covariance level). A must be a nonempty proper subset of the modes.
Covariance partial_transpose(const Covariance& g, std::span<const int> sites_a);
Covariance partial_transpose(const Covariance& g, std::initializer_list<int> sites_a);

/// Logarithmic negativity across the A|rest split:
/// sum over partially transposed symplectic eigenvalues nu < 1 of -log(nu).
/// Exactly zero when no eigenvalue dips below 1 - kNuClamp.
double log_negativity(const Covariance& g, std::span<const int> sites_a,
                      LogBase base = LogBase::two);
double log_negativity(const Covariance& g, std::initializer_list<int> sites_a,
                      LogBase base = LogBase::two);

/// Smallest partially transposed symplectic eigenvalue (the entanglement
/// witness the negativity is computed from).
double min_pt_symplectic_eigenvalue(const Covariance& g, std::span<const int> sites_a);

/// EPR-variance lower bound on the log-negativity between two modes:
/// max(0, -log[ (<(q_n - q_m)^2> + <(p_n + p_m)^2>)/2 ]), with raw
/// (un-doubled) second moments read off the covariance matrix.
double epr_witness_bound(const Covariance& g, int site_n, int site_m,
                         LogBase base = LogBase::two);

}  // namespace qchain
