#pragma once

// Conditional Missingness: does missingness in one variable depend on the
// recorded values of another? Both metrics compare the histogram of all
// recorded values of the condition variable with the histogram restricted to
// items missing in the target variable, over one shared set of bins.

#include "missq/dataset.hpp"
#include "missq/matrix.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace missq {

/// Histogram over a variable's recorded values. Numerical variables use
/// `bin_count` equal-width bins over [min, max] (edges has bin_count + 1
/// entries, the last bin is closed on the right); categorical variables use
/// one bin per distinct label in sorted order.
struct BinnedDistribution {
    std::string variable;
    VariableKind kind = VariableKind::numerical;
    std::size_t bin_count = 0;
    std::vector<double> edges;
    std::vector<std::string> categories;
    std::vector<std::uint64_t> counts;
    /// counts[o] / total, or all zero when total is 0.
    std::vector<double> probabilities;

    std::uint64_t total() const noexcept;
};

/// Counts of `values` in `bins` equal-width bins over [min, max], the last bin
/// closed on the right. A zero range puts everything in bin 0.
std::vector<std::uint64_t> equal_width_counts(std::span<const double> values, std::size_t bins);

/// Shimazaki–Shinomoto cost (2·mean − biased variance) / width² of an
/// equal-width histogram with `bins` bins over [min, max] of `values`.
/// Requires a non-empty input with max > min.
double bin_cost(std::span<const double> values, std::size_t bins);

/// Number of equal-width bins in 1..min(50, distinct values) minimising the
/// Shimazaki–Shinomoto cost; ties resolve to the smaller count. Returns 1
/// when every value is equal and 2 for two distinct values. Throws
/// NoSupportError on empty input.
std::size_t optimal_bin_count(std::span<const double> values);

inline constexpr std::size_t kMaxBinCount = 50;

/// Histogram of all recorded values of variable k together with the bin of
/// every recorded item.
struct VariableBinning {
    BinnedDistribution overall;
    /// Bin index per item (length N). Entries for missing items are unspecified.
    std::vector<std::uint32_t> item_bins;
};

/// Throws NoSupportError when k has no recorded values.
VariableBinning bin_variable(const IncompleteDataset& d, std::size_t k);
BinnedDistribution bin_distribution(const IncompleteDataset& d, std::size_t k);

/// Same bins as `binning.overall`, counting only the items in `items` that are
/// recorded in the binned variable.
BinnedDistribution restrict_distribution(const VariableBinning& binning, const ItemSet& items,
                                         const ItemSet& recorded);

/// Total-variation distance between two count vectors over the same bins,
/// ½·Σ|p − q|. Zero when either side is empty.
double density_difference(std::span<const std::uint64_t> overall, std::span<const std::uint64_t> conditioned);
/// |H(overall) − H(conditioned)| / log(bins) with natural-log Shannon entropy.
/// Zero for a single bin or an empty side.
double entropy_difference(std::span<const std::uint64_t> overall, std::span<const std::uint64_t> conditioned);
double shannon_entropy(std::span<const std::uint64_t> counts);

/// Evidence for missingness of `target` conditioned on `condition`.
struct ConditionalProfile {
    std::size_t target = 0;
    std::size_t condition = 0;
    /// Absent when the condition variable has no recorded values.
    std::optional<BinnedDistribution> overall;
    std::optional<BinnedDistribution> conditioned;
    /// |D_Rk ∩ D_Mj|.
    std::uint64_t support = 0;
    /// |D_Mj ∩ D_Mk|.
    std::uint64_t joint_missing = 0;
    double q_cm_did = 0.0;
    double q_cm_h = 0.0;
};

/// CM metric of missingness in j conditioned on recorded values of k. Zero
/// with zero support when no item is missing in j and recorded in k.
/// Throws NoSupportError when k has no recorded values.
double cm_density_difference(const IncompleteDataset& d, std::size_t j, std::size_t k);
double cm_entropy(const IncompleteDataset& d, std::size_t j, std::size_t k);

ConditionalProfile conditional_profile(const IncompleteDataset& d, std::size_t j, std::size_t k);
/// One profile per k != j, in variable order.
std::vector<ConditionalProfile> conditional_profiles(const IncompleteDataset& d, std::size_t j);

/// Per-variable binnings, computed once and shared by every pair.
/// Variables without recorded values have no binning.
class BinningCache {
public:
    explicit BinningCache(const IncompleteDataset& d);
    const VariableBinning* get(std::size_t k) const { return binnings_[k] ? &*binnings_[k] : nullptr; }

private:
    std::vector<std::optional<VariableBinning>> binnings_;
};

ConditionalProfile conditional_profile(const IncompleteDataset& d, const BinningCache& cache, std::size_t j,
                                       std::size_t k);

struct ConditionalMatrices {
    PairwiseQMMatrix density_difference;
    PairwiseQMMatrix entropy;
    /// Collapse rule for unordered pairs (ordering, filters, exports).
    Aggregate aggregate = Aggregate::max;

    const PairwiseQMMatrix& get(MetricId m) const;
};

/// Entry (j,k) for every ordered pair j != k; support(j,k) = |D_Rk ∩ D_Mj|.
/// Condition variables without recorded values yield 0 with support 0.
ConditionalMatrices cm_matrices(const IncompleteDataset& d, Aggregate aggregate = Aggregate::max);

}  // namespace missq
