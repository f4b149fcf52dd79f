#include "missq/conditional.hpp"

#include "missq/errors.hpp"
#include "missq/kernels/kernels.hpp"
#include "missq/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace missq {

std::uint64_t BinnedDistribution::total() const noexcept {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
}

namespace {

struct Range {
    double lo;
    double hi;
};

Range value_range(std::span<const double> values) {
    auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    return {*mn, *mx};
}

std::vector<std::uint64_t> histogram(std::span<const double> values, Range r, std::size_t bins,
                                     std::vector<std::uint32_t>& scratch) {
    std::vector<std::uint64_t> counts(bins, 0);
    scratch.resize(values.size());
    const double width = (r.hi - r.lo) / static_cast<double>(bins);
    kernels::active_kernels().bin_indices(values, r.lo, width, static_cast<std::uint32_t>(bins), scratch);
    for (auto b : scratch) ++counts[b];
    return counts;
}

std::vector<double> to_probabilities(const std::vector<std::uint64_t>& counts) {
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    std::vector<double> p(counts.size(), 0.0);
    if (total == 0) return p;
    for (std::size_t o = 0; o < counts.size(); ++o)
        p[o] = static_cast<double>(counts[o]) / static_cast<double>(total);
    return p;
}

}  // namespace

std::vector<std::uint64_t> equal_width_counts(std::span<const double> values, std::size_t bins) {
    if (bins == 0) throw ValidationError("equal_width_counts: bin count must be positive");
    std::vector<std::uint64_t> counts(bins, 0);
    if (values.empty()) return counts;
    const Range r = value_range(values);
    if (!(r.hi > r.lo)) {
        counts[0] = values.size();
        return counts;
    }
    std::vector<std::uint32_t> scratch;
    return histogram(values, r, bins, scratch);
}

double bin_cost(std::span<const double> values, std::size_t bins) {
    if (values.empty()) throw NoSupportError("bin_cost: no values");
    if (bins == 0) throw ValidationError("bin_cost: bin count must be positive");
    const Range r = value_range(values);
    if (!(r.hi > r.lo)) throw ValidationError("bin_cost: zero value range");
    std::vector<std::uint32_t> scratch;
    const auto counts = histogram(values, r, bins, scratch);
    const double b = static_cast<double>(bins);
    const double mean = static_cast<double>(values.size()) / b;
    double var = 0.0;
    for (auto c : counts) var += (static_cast<double>(c) - mean) * (static_cast<double>(c) - mean);
    var /= b;
    const double width = (r.hi - r.lo) / b;
    return (2.0 * mean - var) / (width * width);
}

std::size_t optimal_bin_count(std::span<const double> values) {
    if (values.empty()) throw NoSupportError("optimal_bin_count: no values");
    const Range r = value_range(values);
    if (!(r.hi > r.lo)) return 1;

    // With n values over range R, the cost for b bins is
    //   C(b) = (2nb − b·Σc² + n²) / R²,
    // so comparing b·(2n − Σc²) in integers gives the exact argmin.
    const auto n = static_cast<std::int64_t>(values.size());
    // On discrete data the cost keeps falling once bins are narrower than the
    // gaps between values, so candidates stop at the number of distinct values.
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const auto distinct = static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
    // A two-valued variable gets one bin per value: the cost prefers a single
    // bin for balanced binaries, which would blank every CM value against it.
    if (distinct == 2) return 2;
    const std::size_t max_bins = std::min(kMaxBinCount, distinct);
    std::vector<std::uint32_t> scratch;
    std::size_t best = 1;
    std::int64_t best_score = 0;
    for (std::size_t b = 1; b <= max_bins; ++b) {
        const auto counts = histogram(values, r, b, scratch);
        std::int64_t sum_sq = 0;
        for (auto c : counts) sum_sq += static_cast<std::int64_t>(c) * static_cast<std::int64_t>(c);
        const std::int64_t score = static_cast<std::int64_t>(b) * (2 * n - sum_sq);
        if (b == 1 || score < best_score) {
            best = b;
            best_score = score;
        }
    }
    return best;
}

VariableBinning bin_variable(const IncompleteDataset& d, std::size_t k) {
    const auto& v = d.variable(k);
    if (v.recorded_count() == 0)
        throw NoSupportError("variable '" + v.name() + "' has no recorded values to bin");

    VariableBinning out;
    BinnedDistribution& dist = out.overall;
    dist.variable = v.name();
    dist.kind = v.kind();
    const ItemSet recorded = v.recorded();

    if (v.kind() == VariableKind::categorical) {
        dist.categories = v.categories();
        dist.bin_count = dist.categories.size();
        out.item_bins.assign(v.codes().begin(), v.codes().end());
    } else {
        std::vector<double> values;
        values.reserve(v.recorded_count());
        recorded.for_each([&](std::size_t i) { values.push_back(v.numbers()[i]); });
        const Range r = value_range(values);
        const std::size_t bins = optimal_bin_count(values);
        dist.bin_count = bins;
        out.item_bins.assign(d.item_count(), 0);
        if (bins == 1) {
            dist.edges = {r.lo, r.hi};
        } else {
            const double width = (r.hi - r.lo) / static_cast<double>(bins);
            dist.edges.resize(bins + 1);
            for (std::size_t o = 0; o < bins; ++o) dist.edges[o] = r.lo + static_cast<double>(o) * width;
            dist.edges[bins] = r.hi;
            kernels::active_kernels().bin_indices(v.numbers(), r.lo, width, static_cast<std::uint32_t>(bins),
                                                  out.item_bins);
        }
    }
    dist.counts.assign(dist.bin_count, 0);
    recorded.for_each([&](std::size_t i) { ++dist.counts[out.item_bins[i]]; });
    dist.probabilities = to_probabilities(dist.counts);
    return out;
}

BinnedDistribution bin_distribution(const IncompleteDataset& d, std::size_t k) {
    return bin_variable(d, k).overall;
}

BinnedDistribution restrict_distribution(const VariableBinning& binning, const ItemSet& items,
                                         const ItemSet& recorded) {
    BinnedDistribution out = binning.overall;
    std::fill(out.counts.begin(), out.counts.end(), 0);
    (items & recorded).for_each([&](std::size_t i) { ++out.counts[binning.item_bins[i]]; });
    out.probabilities = to_probabilities(out.counts);
    return out;
}

double density_difference(std::span<const std::uint64_t> overall, std::span<const std::uint64_t> conditioned) {
    if (overall.size() != conditioned.size()) throw ValidationError("density_difference: bin count mismatch");
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    for (auto c : overall) n += c;
    for (auto c : conditioned) m += c;
    if (n == 0 || m == 0) return 0.0;
    // ½·Σ|c/n − q/m| = Σ|c·m − q·n| / (2·n·m), summed exactly in integers.
    unsigned __int128 numerator = 0;
    for (std::size_t o = 0; o < overall.size(); ++o) {
        const unsigned __int128 a = static_cast<unsigned __int128>(overall[o]) * m;
        const unsigned __int128 b = static_cast<unsigned __int128>(conditioned[o]) * n;
        numerator += a > b ? a - b : b - a;
    }
    const double value =
        static_cast<double>(numerator) / (2.0 * static_cast<double>(n) * static_cast<double>(m));
    return std::min(value, 1.0);
}

double shannon_entropy(std::span<const std::uint64_t> counts) {
    std::uint64_t n = 0;
    for (auto c : counts) n += c;
    if (n == 0) return 0.0;
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(n);
        h -= p * std::log(p);
    }
    return h;
}

double entropy_difference(std::span<const std::uint64_t> overall, std::span<const std::uint64_t> conditioned) {
    if (overall.size() != conditioned.size()) throw ValidationError("entropy_difference: bin count mismatch");
    if (overall.size() <= 1) return 0.0;
    std::uint64_t m = 0;
    for (auto c : conditioned) m += c;
    std::uint64_t n = 0;
    for (auto c : overall) n += c;
    if (n == 0 || m == 0) return 0.0;
    const double diff = std::fabs(shannon_entropy(overall) - shannon_entropy(conditioned));
    return std::clamp(diff / std::log(static_cast<double>(overall.size())), 0.0, 1.0);
}

BinningCache::BinningCache(const IncompleteDataset& d) : binnings_(d.variable_count()) {
    parallel_for(d.variable_count(), [&](std::size_t k) {
        if (d.variable(k).recorded_count() > 0) binnings_[k] = bin_variable(d, k);
    });
}

namespace {

struct PairCounts {
    std::vector<std::uint64_t> conditioned;
    std::uint64_t support = 0;
};

PairCounts conditioned_counts(const IncompleteDataset& d, const VariableBinning& binning, std::size_t j,
                              std::size_t k) {
    PairCounts out;
    out.conditioned.assign(binning.overall.bin_count, 0);
    const auto mj = d.missing_set(j).words();
    const auto mk = d.missing_set(k).words();
    for (std::size_t w = 0; w < mj.size(); ++w) {
        std::uint64_t bits = mj[w] & ~mk[w];
        while (bits != 0) {
            const auto i = w * ItemSet::kWordBits + static_cast<std::size_t>(__builtin_ctzll(bits));
            ++out.conditioned[binning.item_bins[i]];
            ++out.support;
            bits &= bits - 1;
        }
    }
    return out;
}

ConditionalProfile profile_with_binning(const IncompleteDataset& d, const VariableBinning* binning,
                                        std::size_t j, std::size_t k) {
    ConditionalProfile p;
    p.target = j;
    p.condition = k;
    p.joint_missing = d.missing_set(j).intersection_size(d.missing_set(k));
    if (binning == nullptr) return p;
    PairCounts pc = conditioned_counts(d, *binning, j, k);
    p.overall = binning->overall;
    BinnedDistribution cond = binning->overall;
    cond.counts = std::move(pc.conditioned);
    cond.probabilities = to_probabilities(cond.counts);
    p.conditioned = std::move(cond);
    p.support = pc.support;
    p.q_cm_did = density_difference(p.overall->counts, p.conditioned->counts);
    p.q_cm_h = entropy_difference(p.overall->counts, p.conditioned->counts);
    return p;
}

}  // namespace

ConditionalProfile conditional_profile(const IncompleteDataset& d, const BinningCache& cache, std::size_t j,
                                       std::size_t k) {
    d.variable(j);
    d.variable(k);
    return profile_with_binning(d, cache.get(k), j, k);
}

ConditionalProfile conditional_profile(const IncompleteDataset& d, std::size_t j, std::size_t k) {
    d.variable(j);
    const VariableBinning binning = bin_variable(d, k);
    return profile_with_binning(d, &binning, j, k);
}

double cm_density_difference(const IncompleteDataset& d, std::size_t j, std::size_t k) {
    return conditional_profile(d, j, k).q_cm_did;
}

double cm_entropy(const IncompleteDataset& d, std::size_t j, std::size_t k) {
    return conditional_profile(d, j, k).q_cm_h;
}

std::vector<ConditionalProfile> conditional_profiles(const IncompleteDataset& d, std::size_t j) {
    d.variable(j);
    const BinningCache cache(d);
    std::vector<ConditionalProfile> out;
    for (std::size_t k = 0; k < d.variable_count(); ++k)
        if (k != j) out.push_back(conditional_profile(d, cache, j, k));
    return out;
}

const PairwiseQMMatrix& ConditionalMatrices::get(MetricId m) const {
    if (m == MetricId::cm_did) return density_difference;
    if (m == MetricId::cm_h) return entropy;
    throw ValidationError("metric '" + std::string(to_string(m)) + "' is not a conditional-missingness metric");
}

ConditionalMatrices cm_matrices(const IncompleteDataset& d, Aggregate aggregate) {
    const std::size_t k_vars = d.variable_count();
    if (k_vars < 2) throw TooFewVariablesError(k_vars);
    if (d.item_count() == 0) throw EmptyDatasetError();
    std::vector<std::string> names;
    for (const auto& v : d.variables()) names.push_back(v.name());
    ConditionalMatrices out{PairwiseQMMatrix(MetricId::cm_did, names), PairwiseQMMatrix(MetricId::cm_h, names),
                            aggregate};
    const BinningCache cache(d);
    parallel_for(k_vars, [&](std::size_t j) {
        for (std::size_t k = 0; k < k_vars; ++k) {
            if (k == j) continue;
            const VariableBinning* binning = cache.get(k);
            if (binning == nullptr) {
                out.density_difference.set(j, k, 0.0, 0);
                out.entropy.set(j, k, 0.0, 0);
                continue;
            }
            const PairCounts pc = conditioned_counts(d, *binning, j, k);
            out.density_difference.set(j, k, density_difference(binning->overall.counts, pc.conditioned), pc.support);
            out.entropy.set(j, k, entropy_difference(binning->overall.counts, pc.conditioned), pc.support);
        }
    });
    return out;
}

}  // namespace missq
