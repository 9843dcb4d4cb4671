#include "polaron/kernels.hpp"

#include <cstdlib>
#include <string>

namespace polaron::kernels {

#if defined(POLARON_HAVE_AVX2_TU)
namespace detail {
const Table& avx2_table();
}
#endif

const Table* avx2() {
#if defined(POLARON_HAVE_AVX2_TU)
    static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return ok ? &detail::avx2_table() : nullptr;
#else
    return nullptr;
#endif
}

const Table& active() {
    static const Table* chosen = [] {
        const char* env = std::getenv("POLARON_SIMD");
        const std::string want = env ? env : "auto";
        if (want == "scalar") return &scalar();
        if (const Table* t = avx2()) return t;
        return &scalar();
    }();
    return *chosen;
}

}  // namespace polaron::kernels
