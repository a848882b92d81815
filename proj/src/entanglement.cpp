#include "qchain/entanglement.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "qchain/spectral.hpp"

namespace qchain {

Vec symplectic_eigenvalues(const Covariance& g) {
    const int n = g.modes();
    const Mat root = sym_sqrt_psd(g.m);  // throws if not PSD
    // K = root * sigma * root without forming sigma: sigma swaps and signs
    // column blocks, so (root*sigma) = [-root_right | root_left].
    Mat rs(2 * n, 2 * n);
    rs.leftCols(n) = -root.rightCols(n);
    rs.rightCols(n) = root.leftCols(n);
    Mat k = rs * root;          // antisymmetric
    Mat j = k.transpose() * k;  // = -K^2, eigenvalues nu^2 (doubled)
    Eigen::SelfAdjointEigenSolver<Mat> es(j, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw PhysicsError("eigendecomposition failed");
    Vec lam = es.eigenvalues();
    // ascending; each nu appears an even number of times, so stride-2 picks
    // the n distinct-slot values exactly
    Vec out(n);
    for (int i = 0; i < n; ++i) out(i) = std::sqrt(std::max(0.0, lam(2 * i)));
    return out;
}

namespace {
std::vector<int> checked_partition(const Covariance& g, std::span<const int> sites_a) {
    const int n = g.modes();
    if (sites_a.empty()) throw ConfigError("partition must be nonempty");
    std::set<int> seen;
    for (int s : sites_a) {
        if (s < 0 || s >= n)
            throw ConfigError("partition site " + std::to_string(s) + " out of range");
        if (!seen.insert(s).second)
            throw ConfigError("duplicate partition site " + std::to_string(s));
    }
    if (static_cast<int>(seen.size()) == n)
        throw ConfigError("partition must be a proper subset of the modes");
    return {seen.begin(), seen.end()};
}
}  // namespace

Covariance partial_transpose(const Covariance& g, std::span<const int> sites_a) {
    const auto sites = checked_partition(g, sites_a);
    const int n = g.modes();
    Covariance out = g;
    for (int s : sites) {
        out.m.row(n + s) *= -1.0;
        out.m.col(n + s) *= -1.0;
    }
    return out;
}

Covariance partial_transpose(const Covariance& g, std::initializer_list<int> sites_a) {
    std::vector<int> v(sites_a);
    return partial_transpose(g, std::span<const int>(v));
}

double min_pt_symplectic_eigenvalue(const Covariance& g, std::span<const int> sites_a) {
    return symplectic_eigenvalues(partial_transpose(g, sites_a)).minCoeff();
}

double log_negativity(const Covariance& g, std::span<const int> sites_a, LogBase base) {
    const Vec nus = symplectic_eigenvalues(partial_transpose(g, sites_a));
    double e = 0.0;
    for (int i = 0; i < nus.size(); ++i) {
        if (nus(i) < 1.0 - kNuClamp) e -= log_in_base(nus(i), base);
    }
    return e;
}

double log_negativity(const Covariance& g, std::initializer_list<int> sites_a, LogBase base) {
    std::vector<int> v(sites_a);
    return log_negativity(g, std::span<const int>(v), base);
}

double epr_witness_bound(const Covariance& g, int site_n, int site_m, LogBase base) {
    const int n = g.modes();
    if (site_n == site_m) throw ConfigError("witness requires two distinct sites");
    if (site_n < 0 || site_n >= n || site_m < 0 || site_m >= n)
        throw ConfigError("witness site out of range");
    // raw moments: <q_a q_b> = Gamma_qq(a,b)/2
    const double var_qminus =
        (g.qq(site_n, site_n) + g.qq(site_m, site_m) - 2.0 * g.qq(site_n, site_m)) / 2.0;
    const double var_pplus =
        (g.pp(site_n, site_n) + g.pp(site_m, site_m) + 2.0 * g.pp(site_n, site_m)) / 2.0;
    const double half_sum = (var_qminus + var_pplus) / 2.0;
    if (!(half_sum > 0.0)) throw PhysicsError("EPR variances must be positive");
    // same noise clamp as the negativity, so the bound stays below it at the
    // separable boundary
    if (half_sum >= 1.0 - kNuClamp) return 0.0;
    return -log_in_base(half_sum, base);
}

}  // namespace qchain
