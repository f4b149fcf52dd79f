#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace missq {

enum class MetricId { q_am, jm_mag, jm_dir, jm_abs, cm_did, cm_h };

std::string_view to_string(MetricId m) noexcept;
/// Accepts the canonical ids ("q_am", "jm_abs", "cm_did", ...). Throws
/// ValidationError for anything else.
MetricId parse_metric(std::string_view text);
bool is_pairwise(MetricId m) noexcept;
bool is_conditional(MetricId m) noexcept;

/// How the two directions of a CM pair collapse to one value.
enum class Aggregate { max, min, avg };
std::string_view to_string(Aggregate a) noexcept;
Aggregate parse_aggregate(std::string_view text);

/// K×K matrix of one pairwise metric with per-entry support counts.
/// Entries that have no meaning (diagonal of jm_dir/jm_abs/cm_*) hold NaN.
/// Directional matrices store (j,k) = missingness of j conditioned on k.
class PairwiseQMMatrix {
public:
    PairwiseQMMatrix() = default;
    PairwiseQMMatrix(MetricId metric, std::vector<std::string> variables);

    MetricId metric() const noexcept { return metric_; }
    bool symmetric() const noexcept { return !is_conditional(metric_); }
    std::size_t size() const noexcept { return variables_.size(); }
    const std::vector<std::string>& variables() const noexcept { return variables_; }

    double value(std::size_t j, std::size_t k) const { return values_[j * size() + k]; }
    std::uint64_t support(std::size_t j, std::size_t k) const { return support_[j * size() + k]; }
    bool applicable(std::size_t j, std::size_t k) const { return !std::isnan(value(j, k)); }

    void set(std::size_t j, std::size_t k, double v, std::uint64_t support);

    /// Value used when an unordered pair needs one number: the entry itself for
    /// symmetric metrics, the aggregate of both directions otherwise.
    double pair_value(std::size_t j, std::size_t k, Aggregate agg = Aggregate::max) const;

    friend bool operator==(const PairwiseQMMatrix& a, const PairwiseQMMatrix& b);

private:
    MetricId metric_ = MetricId::jm_mag;
    std::vector<std::string> variables_;
    std::vector<double> values_;
    std::vector<std::uint64_t> support_;
};

inline constexpr double kNotApplicable = std::numeric_limits<double>::quiet_NaN();

}  // namespace missq
