#pragma once

#include <functional>

#include "qchain/common.hpp"

namespace qchain {

/// Cached eigendecomposition V = U diag(omega^2) U^T of a positive definite
/// potential. All trigonometric/thermal matrix functions of V are evaluated
/// in this basis, so one decomposition serves every time sample.
class ModeBasis {
  public:
    explicit ModeBasis(const Mat& v, double eigen_floor = 1e-12);

    int size() const { return static_cast<int>(omega_.size()); }
    const Vec& omega() const { return omega_; }
    const Mat& vectors() const { return u_; }

    /// U diag(w) U^T, lower triangle via the dot3 kernel, mirrored.
    Mat congruence(const Vec& w) const;

    /// Row `site` of U diag(w) U^T without forming the matrix.
    void congruence_row(const Vec& w, int site, double* out) const;

    /// Row `site` of U as a contiguous vector.
    const double* site_row(int site) const { return ut_.col(site).data(); }

  private:
    Vec omega_;
    Mat u_;   // columns are modes
    Mat ut_;  // u_ transposed; its columns are U's rows, contiguous for kernels
};

/// f(A) for symmetric A through its eigendecomposition.
Mat sym_apply(const Mat& a, const std::function<double(double)>& f);

/// Symmetric square root; throws PhysicsError if A has an eigenvalue below
/// -tol, clamps tiny negatives to zero.
Mat sym_sqrt_psd(const Mat& a, double tol = 1e-10);

}  // namespace qchain
