#include "qchain/kernels.hpp"

// Reference kernels. Keep these plain: they are the ground truth the SIMD
// variants are equivalence-tested against.
namespace qchain::kern {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double dot3_scalar(const double* a, const double* w, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * w[i] * b[i];
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

}  // namespace

namespace detail {
const Ops scalar_ops = {dot_scalar, dot3_scalar, axpy_scalar, "scalar"};
}

}  // namespace qchain::kern
