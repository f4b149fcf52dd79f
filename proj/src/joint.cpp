#include "missq/joint.hpp"

#include "missq/errors.hpp"
#include "missq/parallel.hpp"

#include <cmath>

namespace missq {

namespace {

void require_items(const IncompleteDataset& d) {
    if (d.item_count() == 0) throw EmptyDatasetError();
}

}  // namespace

double jm_magnitude_from_counts(std::uint64_t joint, std::uint64_t n) {
    return static_cast<double>(joint) / static_cast<double>(n);
}

double expected_jm_from_counts(std::uint64_t missing_j, std::uint64_t missing_k, std::uint64_t n) {
    return static_cast<double>(missing_j * missing_k) / (static_cast<double>(n) * static_cast<double>(n));
}

double jm_directional_from_counts(std::uint64_t joint, std::uint64_t missing_j, std::uint64_t missing_k,
                                  std::uint64_t n) {
    // (joint/N − mj·mk/N²) = (joint·N − mj·mk) / N²
    const auto numerator = static_cast<std::int64_t>(joint * n) - static_cast<std::int64_t>(missing_j * missing_k);
    return static_cast<double>(numerator) / (static_cast<double>(n) * static_cast<double>(n));
}

std::uint64_t joint_missing_count(const IncompleteDataset& d, std::size_t j, std::size_t k) {
    return d.missing_set(j).intersection_size(d.missing_set(k));
}

double jm_magnitude(const IncompleteDataset& d, std::size_t j, std::size_t k) {
    const auto joint = joint_missing_count(d, j, k);
    require_items(d);
    return jm_magnitude_from_counts(joint, d.item_count());
}

double expected_jm(const IncompleteDataset& d, std::size_t j, std::size_t k) {
    const auto mj = d.variable(j).missing_count();
    const auto mk = d.variable(k).missing_count();
    require_items(d);
    return expected_jm_from_counts(mj, mk, d.item_count());
}

double jm_directional(const IncompleteDataset& d, std::size_t j, std::size_t k) {
    const auto joint = joint_missing_count(d, j, k);
    require_items(d);
    return jm_directional_from_counts(joint, d.variable(j).missing_count(), d.variable(k).missing_count(),
                                      d.item_count());
}

double jm_absolute(const IncompleteDataset& d, std::size_t j, std::size_t k) {
    return std::fabs(jm_directional(d, j, k));
}

const PairwiseQMMatrix& JointMatrices::get(MetricId m) const {
    switch (m) {
        case MetricId::jm_mag: return magnitude;
        case MetricId::jm_dir: return directional;
        case MetricId::jm_abs: return absolute;
        default: break;
    }
    throw ValidationError("metric '" + std::string(to_string(m)) + "' is not a joint-missingness metric");
}

JointMatrices jm_matrices(const IncompleteDataset& d) {
    const std::size_t k_vars = d.variable_count();
    if (k_vars < 2) throw TooFewVariablesError(k_vars);
    require_items(d);

    std::vector<std::string> names;
    for (const auto& v : d.variables()) names.push_back(v.name());
    JointMatrices out{PairwiseQMMatrix(MetricId::jm_mag, names), PairwiseQMMatrix(MetricId::jm_dir, names),
                      PairwiseQMMatrix(MetricId::jm_abs, names)};

    const std::uint64_t n = d.item_count();
    for (std::size_t j = 0; j < k_vars; ++j) {
        const auto mj = d.variable(j).missing_count();
        out.magnitude.set(j, j, jm_magnitude_from_counts(mj, n), mj);
    }
    // Row j fills cells (j,k) and (k,j) for k > j; rows never share a cell.
    parallel_for(k_vars, [&](std::size_t j) {
        const auto& mset_j = d.missing_set(j);
        const auto mj = d.variable(j).missing_count();
        for (std::size_t k = j + 1; k < k_vars; ++k) {
            const auto joint = static_cast<std::uint64_t>(mset_j.intersection_size(d.missing_set(k)));
            const auto mk = d.variable(k).missing_count();
            const double mag = jm_magnitude_from_counts(joint, n);
            const double dir = jm_directional_from_counts(joint, mj, mk, n);
            for (auto [a, b] : {std::pair{j, k}, std::pair{k, j}}) {
                out.magnitude.set(a, b, mag, joint);
                out.directional.set(a, b, dir, joint);
                out.absolute.set(a, b, std::fabs(dir), joint);
            }
        }
    });
    return out;
}

}  // namespace missq
