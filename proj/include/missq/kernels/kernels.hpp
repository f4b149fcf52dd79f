#pragma once

// Data-parallel inner loops used by the metric modules. Every kernel has a
// portable scalar reference; wider variants must produce identical results
// (integer outputs bit-for-bit, bin indices bit-for-bit).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace missq::kernels {

using Word = std::uint64_t;

struct KernelTable {
    std::string_view name;

    /// Number of set bits.
    std::uint64_t (*popcount)(std::span<const Word> a);
    /// |a & b|. Spans must have equal length.
    std::uint64_t (*popcount_and)(std::span<const Word> a, std::span<const Word> b);
    /// |a & ~b|. Spans must have equal length; bits past the logical size of
    /// `a` must be clear.
    std::uint64_t (*popcount_andnot)(std::span<const Word> a, std::span<const Word> b);
    /// out[i] = clamp(floor((values[i] - lo) / width), 0, bins - 1).
    /// `width` must be positive and finite, `bins` >= 1.
    void (*bin_indices)(std::span<const double> values, double lo, double width,
                        std::uint32_t bins, std::span<std::uint32_t> out);
};

const KernelTable& scalar_kernels() noexcept;

/// nullptr when the binary was built without AVX2 support or the running CPU
/// lacks it.
const KernelTable* avx2_kernels() noexcept;

/// Widest table supported by this CPU. Setting MISSQ_FORCE_SCALAR=1 in the
/// environment pins the scalar reference. Resolved once per process.
const KernelTable& active_kernels() noexcept;

}  // namespace missq::kernels
