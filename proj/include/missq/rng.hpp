#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace missq {

/// Seeded generator whose output sequence is fixed across standard libraries:
/// std::mt19937_64 is fully specified, and the distributions below are
/// implemented here instead of using the implementation-defined std ones.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi]. Returns lo when hi == lo.
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Uniform integer in [0, bound). `bound` must be positive.
    std::uint64_t below(std::uint64_t bound) {
        // Rejection sampling on the top of the range keeps the result unbiased.
        const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
        std::uint64_t x = next();
        while (x >= limit) x = next();
        return x % bound;
    }

    /// `count` distinct elements of `pool`, chosen uniformly without
    /// replacement (partial Fisher–Yates). `pool` is reordered in place.
    std::vector<std::size_t> sample(std::vector<std::size_t>& pool, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) {
            const auto r = i + static_cast<std::size_t>(below(pool.size() - i));
            std::swap(pool[i], pool[r]);
        }
        return {pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(count)};
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace missq
