#include "missq/kernels/kernels.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace missq::kernels {
namespace {

std::uint64_t popcount_scalar(std::span<const Word> a) {
    std::uint64_t total = 0;
    for (Word w : a) total += static_cast<std::uint64_t>(std::popcount(w));
    return total;
}

std::uint64_t popcount_and_scalar(std::span<const Word> a, std::span<const Word> b) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        total += static_cast<std::uint64_t>(std::popcount(a[i] & b[i]));
    return total;
}

std::uint64_t popcount_andnot_scalar(std::span<const Word> a, std::span<const Word> b) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        total += static_cast<std::uint64_t>(std::popcount(a[i] & ~b[i]));
    return total;
}

void bin_indices_scalar(std::span<const double> values, double lo, double width,
                        std::uint32_t bins, std::span<std::uint32_t> out) {
    const double last = static_cast<double>(bins - 1);
    for (std::size_t i = 0; i < values.size(); ++i) {
        double t = std::floor((values[i] - lo) / width);
        t = std::min(std::max(t, 0.0), last);
        out[i] = static_cast<std::uint32_t>(t);
    }
}

constexpr KernelTable kScalar{
    "scalar", popcount_scalar, popcount_and_scalar, popcount_andnot_scalar, bin_indices_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

}  // namespace missq::kernels
