#include "missq/kernels/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace missq::kernels {

#if defined(MISSQ_HAVE_AVX2)
const KernelTable* avx2_table_unchecked() noexcept;
#endif

const KernelTable* avx2_kernels() noexcept {
#if defined(MISSQ_HAVE_AVX2)
    static const bool supported = __builtin_cpu_supports("avx2") != 0;
    return supported ? avx2_table_unchecked() : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active_kernels() noexcept {
    static const KernelTable& chosen = [&]() -> const KernelTable& {
        const char* force = std::getenv("MISSQ_FORCE_SCALAR");
        if (force != nullptr && std::strcmp(force, "0") != 0 && *force != '\0') return scalar_kernels();
        if (const KernelTable* wide = avx2_kernels()) return *wide;
        return scalar_kernels();
    }();
    return chosen;
}

}  // namespace missq::kernels
