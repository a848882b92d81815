#include "qchain/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "qchain/kernels.hpp"

namespace qchain {

ModeBasis::ModeBasis(const Mat& v, double eigen_floor) {
    if (v.rows() != v.cols()) throw PhysicsError("potential matrix must be square");
    Eigen::SelfAdjointEigenSolver<Mat> es(v);
    if (es.info() != Eigen::Success) throw PhysicsError("eigendecomposition failed");
    const Vec& lam = es.eigenvalues();
    if (lam.minCoeff() <= eigen_floor)
        throw PhysicsError("potential is not positive definite: min eigenvalue " +
                           std::to_string(lam.minCoeff()));
    omega_ = lam.cwiseSqrt();
    u_ = es.eigenvectors();
    ut_ = u_.transpose();
}

Mat ModeBasis::congruence(const Vec& w) const {
    const int n = size();
    Mat out(n, n);
    const auto& k = kern::ops();
    const double* wp = w.data();
    for (int i = 0; i < n; ++i) {
        const double* ui = ut_.col(i).data();
        for (int j = 0; j <= i; ++j) {
            const double v = k.dot3(ui, wp, ut_.col(j).data(), static_cast<std::size_t>(n));
            out(i, j) = v;
            out(j, i) = v;
        }
    }
    return out;
}

void ModeBasis::congruence_row(const Vec& w, int site, double* out) const {
    const int n = size();
    const auto& k = kern::ops();
    Vec scaled = w.cwiseProduct(ut_.col(site));
    const double* sp = scaled.data();
    for (int j = 0; j < n; ++j)
        out[j] = k.dot(ut_.col(j).data(), sp, static_cast<std::size_t>(n));
}

Mat sym_apply(const Mat& a, const std::function<double(double)>& f) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    if (es.info() != Eigen::Success) throw PhysicsError("eigendecomposition failed");
    Vec w = es.eigenvalues().unaryExpr([&](double x) { return f(x); });
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
}

Mat sym_sqrt_psd(const Mat& a, double tol) {
    Eigen::SelfAdjointEigenSolver<Mat> es(a);
    if (es.info() != Eigen::Success) throw PhysicsError("eigendecomposition failed");
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    if (es.eigenvalues().minCoeff() < -tol * scale)
        throw PhysicsError("matrix is not positive semidefinite: min eigenvalue " +
                           std::to_string(es.eigenvalues().minCoeff()));
    Vec w = es.eigenvalues().unaryExpr([](double x) { return x > 0.0 ? std::sqrt(x) : 0.0; });
    return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace qchain
