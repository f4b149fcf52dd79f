#include "missq/quality.hpp"

#include "missq/errors.hpp"

namespace missq {

const PairwiseQMMatrix& QualityMatrices::get(MetricId m) const {
    if (!is_pairwise(m)) throw ValidationError("q_am is a per-variable metric, not a matrix");
    if (is_conditional(m)) {
        if (!conditional) throw UncomputedError("metric '" + std::string(to_string(m)) + "' has not been computed");
        return conditional->get(m);
    }
    if (!joint) throw UncomputedError("metric '" + std::string(to_string(m)) + "' has not been computed");
    return joint->get(m);
}

bool QualityMatrices::has(MetricId m) const noexcept {
    if (!is_pairwise(m)) return false;
    return is_conditional(m) ? conditional.has_value() : joint.has_value();
}

std::size_t QualityMatrices::size() const noexcept {
    if (joint) return joint->magnitude.size();
    if (conditional) return conditional->density_difference.size();
    return 0;
}

QualityMatrices compute_quality_matrices(const IncompleteDataset& d, const QualityOptions& options) {
    QualityMatrices q;
    q.joint = jm_matrices(d);
    if (options.conditional) q.conditional = cm_matrices(d, options.aggregate);
    return q;
}

}  // namespace missq
