#pragma once

#include "missq/matrix.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace missq {

struct QualityMatrices;

enum class CompareOp { less, less_equal, greater, greater_equal };

std::string_view to_string(CompareOp op) noexcept;
/// Shortest round-trip form of a threshold.
std::string format_threshold(double v);
CompareOp parse_compare_op(std::string_view text);

struct Comparison {
    CompareOp op = CompareOp::greater;
    double threshold = 0.0;

    bool operator()(double value) const noexcept;
};

/// `metric op threshold`, e.g. jm_dir < 0.05.
struct Predicate {
    MetricId metric = MetricId::jm_abs;
    Comparison comparison;

    std::string to_string() const;
};

/// Parses one conjunct such as "jm_dir<0.05" or "cm_did >= 0.9".
Predicate parse_predicate(std::string_view text);

/// Conjunction of predicates over unordered variable pairs. CM predicates use
/// the aggregated value of both directions.
struct EdgeFilter {
    std::vector<Predicate> predicates;

    /// Comma-joined conjuncts; an empty string is the empty filter.
    static EdgeFilter parse(std::string_view text);
    std::string to_string() const;

    /// Throws UncomputedError if a predicate names a metric that is absent.
    void check_available(const QualityMatrices& q) const;
    bool accepts(const QualityMatrices& q, std::size_t j, std::size_t k) const;
};

/// Every unordered pair (j < k) accepted by the filter, in index order.
std::vector<std::pair<std::size_t, std::size_t>> filter_edges(const QualityMatrices& q, const EdgeFilter& filter);

}  // namespace missq
