// Compiled with -mavx2 on x86-64; only reached after a runtime CPU check.

#include "missq/kernels/kernels.hpp"

#if defined(MISSQ_HAVE_AVX2)

#include <immintrin.h>

#include <algorithm>
#include <bit>
#include <cmath>

namespace missq::kernels {
namespace {

// Nibble-lookup popcount (Mula): per-byte counts via pshufb, folded into
// four 64-bit lanes with sad_epu8.
inline __m256i popcount_bytes(__m256i v) {
    const __m256i lookup = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                            0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low_mask = _mm256_set1_epi8(0x0f);
    const __m256i lo = _mm256_and_si256(v, low_mask);
    const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
    const __m256i counts =
        _mm256_add_epi8(_mm256_shuffle_epi8(lookup, lo), _mm256_shuffle_epi8(lookup, hi));
    return _mm256_sad_epu8(counts, _mm256_setzero_si256());
}

inline std::uint64_t horizontal_sum(__m256i acc) {
    alignas(32) std::uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
    return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

inline __m256i load(const Word* p) { return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p)); }

std::uint64_t popcount_avx2(std::span<const Word> a) {
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 4 <= a.size(); i += 4) acc = _mm256_add_epi64(acc, popcount_bytes(load(a.data() + i)));
    std::uint64_t total = horizontal_sum(acc);
    for (; i < a.size(); ++i) total += static_cast<std::uint64_t>(std::popcount(a[i]));
    return total;
}

std::uint64_t popcount_and_avx2(std::span<const Word> a, std::span<const Word> b) {
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 4 <= a.size(); i += 4) {
        const __m256i x = _mm256_and_si256(load(a.data() + i), load(b.data() + i));
        acc = _mm256_add_epi64(acc, popcount_bytes(x));
    }
    std::uint64_t total = horizontal_sum(acc);
    for (; i < a.size(); ++i) total += static_cast<std::uint64_t>(std::popcount(a[i] & b[i]));
    return total;
}

std::uint64_t popcount_andnot_avx2(std::span<const Word> a, std::span<const Word> b) {
    __m256i acc = _mm256_setzero_si256();
    std::size_t i = 0;
    for (; i + 4 <= a.size(); i += 4) {
        // andnot computes ~first & second
        const __m256i x = _mm256_andnot_si256(load(b.data() + i), load(a.data() + i));
        acc = _mm256_add_epi64(acc, popcount_bytes(x));
    }
    std::uint64_t total = horizontal_sum(acc);
    for (; i < a.size(); ++i) total += static_cast<std::uint64_t>(std::popcount(a[i] & ~b[i]));
    return total;
}

void bin_indices_avx2(std::span<const double> values, double lo, double width,
                      std::uint32_t bins, std::span<std::uint32_t> out) {
    const double last = static_cast<double>(bins - 1);
    const __m256d vlo = _mm256_set1_pd(lo);
    const __m256d vwidth = _mm256_set1_pd(width);
    const __m256d vzero = _mm256_setzero_pd();
    const __m256d vlast = _mm256_set1_pd(last);
    std::size_t i = 0;
    for (; i + 4 <= values.size(); i += 4) {
        __m256d t = _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(values.data() + i), vlo), vwidth);
        t = _mm256_floor_pd(t);
        t = _mm256_min_pd(_mm256_max_pd(t, vzero), vlast);
        _mm_storeu_si128(reinterpret_cast<__m128i*>(out.data() + i), _mm256_cvttpd_epi32(t));
    }
    for (; i < values.size(); ++i) {
        double t = std::floor((values[i] - lo) / width);
        t = std::min(std::max(t, 0.0), last);
        out[i] = static_cast<std::uint32_t>(t);
    }
}

constexpr KernelTable kAvx2{
    "avx2", popcount_avx2, popcount_and_avx2, popcount_andnot_avx2, bin_indices_avx2,
};

}  // namespace

const KernelTable* avx2_table_unchecked() noexcept { return &kAvx2; }

}  // namespace missq::kernels

#endif
