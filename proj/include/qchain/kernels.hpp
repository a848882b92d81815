#pragma once

#include <cstddef>

// Arithmetic inner-loop kernels. Scalar reference implementations and an
// AVX2/FMA variant are both compiled in; the active table is picked once at
// startup from CPU capabilities (override with QCHAIN_KERNEL=scalar|avx2).
// All higher-level dense loops (eigenbasis congruences, tracked-row
// assembly, lag sums) funnel through this table.
namespace qchain::kern {

enum class Backend { scalar, avx2 };

struct Ops {
    // sum_i a[i]*b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // sum_i a[i]*w[i]*b[i]
    double (*dot3)(const double* a, const double* w, const double* b, std::size_t n);
    // y[i] += alpha*x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    const char* name;
};

/// Active kernel table.
const Ops& ops();

Backend active_backend();
const char* backend_name();

/// True when the running CPU supports the AVX2/FMA variant.
bool avx2_available();

/// Test hook: pin the backend. Throws std::runtime_error if unsupported.
void force_backend(Backend b);

namespace detail {
extern const Ops scalar_ops;
const Ops* avx2_ops();  // nullptr when not compiled in
}  // namespace detail

}  // namespace qchain::kern
