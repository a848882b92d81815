#pragma once

#include <span>
#include <vector>

#include "qchain/common.hpp"

namespace qchain {

/// Second-moment matrix Gamma_{R,S} = 2 Re<(R-<R>)(S-<S>)>, canonical
/// ordering (q_1..q_n, p_1..p_n). The vacuum is the identity; physical
/// states have every symplectic eigenvalue >= 1.
struct Covariance {
    Mat m;

    Covariance() = default;
    explicit Covariance(Mat mm);

    int modes() const { return static_cast<int>(m.rows()) / 2; }
    void symmetrize() { m = ((m + m.transpose()) * 0.5).eval(); }

    double qq(int i, int j) const { return m(i, j); }
    double pp(int i, int j) const { return m(modes() + i, modes() + j); }
    double qp(int i, int j) const { return m(i, modes() + j); }
};

/// sigma = [[0, I], [-I, 0]] in the (q..., p...) ordering.
Mat symplectic_form(int n_modes);

/// Ground state of n uncoupled unit oscillators: the 2n x 2n identity.
Covariance vacuum_state(int n_modes);

/// Thermal (Gibbs) state of H = (p^T p + q^T V q)/2 at dimensionless
/// temperature T: Gamma_qq = W^-1 coth(W/2T), Gamma_pp = W coth(W/2T),
/// W = V^(1/2). T = 0 gives the ground state.
Covariance gibbs_state(const Mat& v, double temperature);

/// Two-mode squeezed state with parameter r >= 0.
Covariance two_mode_squeezed(double r);

/// Partial trace onto the selected modes: principal submatrix re-packed in
/// (q..., p...) ordering.
Covariance reduce(const Covariance& g, std::span<const int> sites);
Covariance reduce(const Covariance& g, std::initializer_list<int> sites);

inline constexpr double kValidityTol = 1e-8;

struct Validity {
    double min_nu;   // smallest symplectic eigenvalue
    double margin;   // min_nu - 1
    bool ok;         // min_nu >= 1 - kValidityTol
};

/// Uncertainty-principle guard; throws PhysicsError on asymmetric input.
Validity check_valid(const Covariance& g, double tol = kValidityTol);

}  // namespace qchain
