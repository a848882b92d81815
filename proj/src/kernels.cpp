#include "qchain/kernels.hpp"

#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace qchain::kern {
namespace {

bool cpu_supports_avx2_fma() {
#if defined(__x86_64__) || defined(__i386__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const Ops* g_active = nullptr;

const Ops* pick_initial() {
    const char* env = std::getenv("QCHAIN_KERNEL");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0) return &detail::scalar_ops;
        if (std::strcmp(env, "avx2") == 0) {
            const Ops* v = detail::avx2_ops();
            if (v == nullptr || !cpu_supports_avx2_fma())
                throw std::runtime_error("QCHAIN_KERNEL=avx2 requested but AVX2/FMA is unavailable");
            return v;
        }
        // anything else (incl. "auto") falls through to detection
    }
    const Ops* v = detail::avx2_ops();
    if (v != nullptr && cpu_supports_avx2_fma()) return v;
    return &detail::scalar_ops;
}

}  // namespace

const Ops& ops() {
    if (g_active == nullptr) g_active = pick_initial();
    return *g_active;
}

Backend active_backend() {
    return &ops() == &detail::scalar_ops ? Backend::scalar : Backend::avx2;
}

const char* backend_name() { return ops().name; }

bool avx2_available() { return detail::avx2_ops() != nullptr && cpu_supports_avx2_fma(); }

void force_backend(Backend b) {
    if (b == Backend::scalar) {
        g_active = &detail::scalar_ops;
        return;
    }
    if (!avx2_available()) throw std::runtime_error("AVX2/FMA backend unavailable on this CPU");
    g_active = detail::avx2_ops();
}

}  // namespace qchain::kern
