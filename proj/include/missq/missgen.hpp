#pragma once

// Synthetic missingness: replace recorded values of a complete dataset with
// Missing so that Amount, Joint or Conditional Missingness hit given targets,
// and report exactly what was injected.

#include "missq/dataset.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace missq {

enum class GenMode { am, jm, cm };
enum class JmPattern { equal, above, below };
enum class RangeType { low, medium, high };

std::string_view to_string(GenMode m) noexcept;
std::string_view to_string(JmPattern p) noexcept;
std::string_view to_string(RangeType r) noexcept;
GenMode parse_gen_mode(std::string_view text);
JmPattern parse_jm_pattern(std::string_view text);
RangeType parse_range_type(std::string_view text);

/// Strength levels used for conditional structures.
inline constexpr double kLowCm = 0.3;
inline constexpr double kMediumCm = 0.6;
inline constexpr double kHighCm = 0.9;

struct JmPairSpec {
    std::string j;
    std::string k;
    double p_j = 0.0;
    double p_k = 0.0;
    JmPattern pattern = JmPattern::equal;
    /// Absent: p_j·p_k for `equal`, otherwise the midpoint between the
    /// independence value and the Fréchet bound on the pattern's side.
    std::optional<double> p_jk;
};

struct CmPairSpec {
    std::string j;  ///< receives the missing values
    std::string k;  ///< condition variable, left complete
    double am_j = 0.0;
    RangeType range_type = RangeType::low;
    double strength = kLowCm;
};

struct MissingnessSpec {
    std::uint64_t seed = 0;
    GenMode mode = GenMode::am;
    /// Fixed per-variable fractions for AM mode.
    std::map<std::string, double> am_targets;
    /// Range from which AM fractions are drawn for variables without a fixed one.
    double am_range_lo = 0.0;
    double am_range_hi = 0.5;
    std::vector<JmPairSpec> jm_pairs;
    std::vector<CmPairSpec> cm_pairs;
};

/// A condition-range endpoint: a number for numerical variables, a label for
/// categorical ones.
using IntervalBound = std::variant<double, std::string>;

struct AmRecord {
    std::string variable;
    double target = 0.0;
    std::size_t missing = 0;
};

struct JmRecord {
    std::string j;
    std::string k;
    JmPattern pattern = JmPattern::equal;
    double target_p_j = 0.0;
    double target_p_k = 0.0;
    double target_p_jk = 0.0;
    std::size_t missing_j = 0;
    std::size_t missing_k = 0;
    std::size_t joint = 0;
    /// target − achieved fraction.
    double residual_p_j = 0.0;
    double residual_p_k = 0.0;
    double residual_p_jk = 0.0;
};

struct CmRecord {
    std::string j;
    std::string k;
    RangeType range_type = RangeType::low;
    double strength = 0.0;
    double am_j = 0.0;
    IntervalBound interval_lo;
    IntervalBound interval_hi;
    /// Items of k whose value lies inside the condition range.
    std::size_t inside_items = 0;
    std::size_t missing_j = 0;
    std::size_t in_range = 0;
    std::size_t out_of_range = 0;
};

struct GroundTruthManifest {
    std::uint64_t seed = 0;
    GenMode mode = GenMode::am;
    std::string source;
    std::size_t item_count = 0;
    /// Missing count per variable of the emitted dataset, in variable order.
    std::vector<std::pair<std::string, std::size_t>> missing_counts;
    std::vector<AmRecord> am;
    std::vector<JmRecord> jm;
    std::vector<CmRecord> cm;
};

struct Injection {
    IncompleteDataset dataset;
    GroundTruthManifest manifest;
};

/// round(N·fraction) with halves rounded up.
std::size_t target_count(std::size_t n, double fraction);

/// Throws ValidationError for malformed specs (fractions outside [0,1],
/// unknown or overlapping variables) and FeasibilityError naming the violated
/// bound for unreachable targets.
Injection inject_am(const IncompleteDataset& complete, const MissingnessSpec& spec);
Injection inject_jm(const IncompleteDataset& complete, const MissingnessSpec& spec);
Injection inject_cm(const IncompleteDataset& complete, const MissingnessSpec& spec);
/// Dispatches on spec.mode.
Injection inject(const IncompleteDataset& complete, const MissingnessSpec& spec);

/// Value interval of the selected third of k's recorded values plus the items
/// inside it. Thirds split at ranks ⌈n/3⌉ and ⌈2n/3⌉ of the sorted values;
/// items tied with a boundary value stay in the lower third.
struct ConditionRange {
    IntervalBound lo;
    IntervalBound hi;
    ItemSet inside;
};
ConditionRange condition_range(const IncompleteDataset& d, std::size_t k, RangeType type);

/// Recounts the manifest against a dataset; returns one message per mismatch.
std::vector<std::string> verify_manifest(const IncompleteDataset& d, const GroundTruthManifest& manifest);

}  // namespace missq
