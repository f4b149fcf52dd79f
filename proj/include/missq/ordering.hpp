#pragma once

#include "missq/filter.hpp"
#include "missq/matrix.hpp"
#include "missq/quality.hpp"
#include "missq/univariate.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace missq {

struct VariableOrdering {
    MetricId metric = MetricId::q_am;
    /// permutation[p] = variable index shown at position p.
    std::vector<std::size_t> permutation;
    /// Adjacent in `permutation`. For univariate orderings: the first two.
    std::pair<std::size_t, std::size_t> anchor_pair{0, 0};
};

/// True when `p` is a bijection on 0..p.size()-1.
bool is_permutation(std::span<const std::size_t> p);

/// Stable sort of variables by Q_AM; equal values keep index order.
VariableOrdering order_by_univariate(const MissingnessProfile& profile, bool descending = true);

/// Greedy pairwise ordering. The pair with the highest value seeds the
/// sequence; every remaining variable is then taken in turn, picking the one
/// with the highest value against either end and attaching it on that end.
/// Ties go to the lower variable index and to the left end. Directional
/// matrices are symmetrised with `aggregate`. Requires K >= 2.
VariableOrdering order_by_pairwise(const PairwiseQMMatrix& matrix, Aggregate aggregate = Aggregate::max);

/// Variables whose Q_AM satisfies `comparison` (all variables when absent),
/// sorted by value descending with ties by index, truncated to `top_n`.
std::vector<std::size_t> threshold_select(const MissingnessProfile& profile,
                                          std::optional<Comparison> comparison,
                                          std::optional<std::size_t> top_n = std::nullopt);

/// Pairwise form: variables incident to at least one pair whose `metric`
/// value satisfies `comparison`, ranked by their best satisfying pair value.
std::vector<std::size_t> threshold_select(const QualityMatrices& matrices, MetricId metric,
                                          std::optional<Comparison> comparison,
                                          std::optional<std::size_t> top_n = std::nullopt);

/// Conjunctive form: variables incident to a pair accepted by every predicate,
/// ranked by the first predicate's metric.
std::vector<std::size_t> threshold_select(const QualityMatrices& matrices, const EdgeFilter& filter,
                                          std::optional<std::size_t> top_n = std::nullopt);

}  // namespace missq
