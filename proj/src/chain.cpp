#include "qchain/chain.hpp"

#include <Eigen/Eigenvalues>
#include <numbers>

namespace qchain {

void ChainSpec::validate() const {
    if (n_sites < 2) throw ConfigError("chain.sites must be >= 2, got " + std::to_string(n_sites));
    if (!(coupling >= 0.0))
        throw ConfigError("chain.coupling must be >= 0, got " + std::to_string(coupling));
}

void BathSpec::validate() const {
    if (modes_per_oscillator < 0)
        throw ConfigError("bath.modes must be >= 0, got " + std::to_string(modes_per_oscillator));
    if (!(cutoff > 0.0)) throw ConfigError("bath.cutoff must be > 0, got " + std::to_string(cutoff));
    if (!(coupling >= 0.0))
        throw ConfigError("bath.coupling must be >= 0, got " + std::to_string(coupling));
    if (!(temperature >= 0.0))
        throw ConfigError("bath.temperature must be >= 0, got " + std::to_string(temperature));
}

double BathSpec::recurrence_time() const {
    return 2.0 * std::numbers::pi * static_cast<double>(modes_per_oscillator) / cutoff;
}

int required_bath_modes(double t_end, double cutoff) {
    return static_cast<int>(std::ceil(t_end * cutoff / (2.0 * std::numbers::pi))) + 1;
}

Mat build_potential(const ChainSpec& spec, double c_value) {
    spec.validate();
    if (!(c_value >= 0.0))
        throw ConfigError("coupling value must be >= 0, got " + std::to_string(c_value));
    const int n = spec.n_sites;
    Mat v = Mat::Identity(n, n);
    // accumulate c*(q_a - q_b)^2 per bond
    const int n_bonds = spec.boundary == Boundary::periodic ? n : n - 1;
    for (int k = 0; k < n_bonds; ++k) {
        const int a = k;
        const int b = (k + 1) % n;
        v(a, a) += c_value;
        v(b, b) += c_value;
        v(a, b) -= c_value;
        v(b, a) -= c_value;
    }
    if (spec.boundary == Boundary::open && spec.onsite == OnsiteForm::uniform) {
        for (int k = 0; k < n; ++k) v(k, k) = 1.0 + 2.0 * c_value;
    }
    // cannot fail for c >= 0 with this construction; guarded regardless
    Eigen::LLT<Mat> llt(v);
    if (llt.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<Mat> es(v, Eigen::EigenvaluesOnly);
        throw StabilityError("chain potential is not positive definite (min eigenvalue " +
                             std::to_string(es.eigenvalues().minCoeff()) + ")");
    }
    return v;
}

double dispersion(const ChainSpec& spec, int mode_index) {
    spec.validate();
    if (spec.boundary != Boundary::periodic)
        throw ConfigError("dispersion is defined for periodic chains only; diagonalize the potential instead");
    if (mode_index < 1 || mode_index > spec.n_sites)
        throw ConfigError("mode index out of range 1.." + std::to_string(spec.n_sites));
    const double s = std::sin(std::numbers::pi * static_cast<double>(mode_index) /
                              static_cast<double>(spec.n_sites));
    return std::sqrt(1.0 + 4.0 * spec.coupling * s * s);
}

Mat augment_with_baths(const Mat& v_sys, const BathSpec& bath) {
    bath.validate();
    const int n_sys = static_cast<int>(v_sys.rows());
    const int m = bath.modes_per_oscillator;
    if (m == 0) return v_sys;
    const int n = n_sys * (1 + m);
    Mat v = Mat::Zero(n, n);
    v.topLeftCorner(n_sys, n_sys) = v_sys;
    for (int j = 0; j < n_sys; ++j) {
        for (int i = 1; i <= m; ++i) {
            const double wt = static_cast<double>(i) * bath.cutoff / static_cast<double>(m);
            const int k = n_sys + j * m + (i - 1);
            v(k, k) = wt * wt;
            v(j, k) = bath.coupling * wt;
            v(k, j) = bath.coupling * wt;
        }
    }
    Eigen::LLT<Mat> llt(v);
    if (llt.info() != Eigen::Success) {
        Eigen::SelfAdjointEigenSolver<Mat> es(v, Eigen::EigenvaluesOnly);
        throw StabilityError("unstable augmented potential: min eigenvalue " +
                             std::to_string(es.eigenvalues().minCoeff()) +
                             " <= 0 (bath coupling too large for this cutoff)");
    }
    return v;
}

}  // namespace qchain
