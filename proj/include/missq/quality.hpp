#pragma once

#include "missq/conditional.hpp"
#include "missq/joint.hpp"
#include "missq/univariate.hpp"

#include <optional>

namespace missq {

/// Every pairwise matrix computed for one dataset. The CM pair may be absent
/// when the caller skipped it.
struct QualityMatrices {
    std::optional<JointMatrices> joint;
    std::optional<ConditionalMatrices> conditional;

    /// Throws UncomputedError when the metric's family was not computed and
    /// ValidationError for q_am.
    const PairwiseQMMatrix& get(MetricId m) const;
    bool has(MetricId m) const noexcept;
    std::size_t size() const noexcept;
    Aggregate aggregate() const noexcept { return conditional ? conditional->aggregate : Aggregate::max; }
};

struct QualityOptions {
    bool conditional = true;
    Aggregate aggregate = Aggregate::max;
};

QualityMatrices compute_quality_matrices(const IncompleteDataset& d, const QualityOptions& options = {});

}  // namespace missq
