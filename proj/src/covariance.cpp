#include "qchain/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "qchain/entanglement.hpp"
#include "qchain/spectral.hpp"

namespace qchain {

Covariance::Covariance(Mat mm) : m(std::move(mm)) {
    if (m.rows() != m.cols() || m.rows() % 2 != 0)
        throw PhysicsError("covariance matrix must be square with even dimension");
}

Mat symplectic_form(int n_modes) {
    Mat s = Mat::Zero(2 * n_modes, 2 * n_modes);
    s.topRightCorner(n_modes, n_modes) = Mat::Identity(n_modes, n_modes);
    s.bottomLeftCorner(n_modes, n_modes) = -Mat::Identity(n_modes, n_modes);
    return s;
}

Covariance vacuum_state(int n_modes) {
    if (n_modes < 1) throw ConfigError("mode count must be >= 1");
    return Covariance(Mat::Identity(2 * n_modes, 2 * n_modes));
}

Covariance gibbs_state(const Mat& v, double temperature) {
    if (!(temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
    ModeBasis basis(v);  // throws if V is not positive definite
    const Vec& w = basis.omega();
    Vec coth;
    if (temperature == 0.0) {
        coth = Vec::Ones(w.size());
    } else {
        coth = w.unaryExpr([&](double omega) { return 1.0 / std::tanh(omega / (2.0 * temperature)); });
    }
    const int n = basis.size();
    Mat g = Mat::Zero(2 * n, 2 * n);
    g.topLeftCorner(n, n) = basis.congruence(coth.cwiseQuotient(w));
    g.bottomRightCorner(n, n) = basis.congruence(coth.cwiseProduct(w));
    return Covariance(std::move(g));
}

Covariance two_mode_squeezed(double r) {
    if (!(r >= 0.0)) throw ConfigError("squeezing parameter must be >= 0");
    const double ch = std::cosh(2.0 * r);
    const double sh = std::sinh(2.0 * r);
    Mat g = Mat::Identity(4, 4) * ch;
    g(0, 1) = g(1, 0) = sh;
    g(2, 3) = g(3, 2) = -sh;
    return Covariance(std::move(g));
}

namespace {
void check_sites(int n_modes, std::span<const int> sites) {
    if (sites.empty()) throw ConfigError("site selection must be nonempty");
    std::set<int> seen;
    for (int s : sites) {
        if (s < 0 || s >= n_modes)
            throw ConfigError("site index " + std::to_string(s) + " out of range 0.." +
                              std::to_string(n_modes - 1));
        if (!seen.insert(s).second) throw ConfigError("duplicate site index " + std::to_string(s));
    }
}
}  // namespace

Covariance reduce(const Covariance& g, std::span<const int> sites) {
    const int n = g.modes();
    check_sites(n, sites);
    const int k = static_cast<int>(sites.size());
    Mat out(2 * k, 2 * k);
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            out(a, b) = g.m(sites[a], sites[b]);
            out(a, k + b) = g.m(sites[a], n + sites[b]);
            out(k + a, b) = g.m(n + sites[a], sites[b]);
            out(k + a, k + b) = g.m(n + sites[a], n + sites[b]);
        }
    }
    return Covariance(std::move(out));
}

Covariance reduce(const Covariance& g, std::initializer_list<int> sites) {
    std::vector<int> v(sites);
    return reduce(g, std::span<const int>(v));
}

Validity check_valid(const Covariance& g, double tol) {
    const double asym = (g.m - g.m.transpose()).cwiseAbs().maxCoeff();
    const double scale = std::max(1.0, g.m.cwiseAbs().maxCoeff());
    if (asym > 1e-12 * scale)
        throw PhysicsError("covariance matrix is not symmetric (defect " + std::to_string(asym) + ")");
    const Vec nus = symplectic_eigenvalues(g);
    const double min_nu = nus.minCoeff();
    return Validity{min_nu, min_nu - 1.0, min_nu >= 1.0 - tol};
}

}  // namespace qchain
