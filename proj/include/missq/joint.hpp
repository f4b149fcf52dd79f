#pragma once

// Joint Missingness: how often two variables are missing on the same items,
// compared with what independent missingness would produce.

#include "missq/dataset.hpp"
#include "missq/matrix.hpp"

#include <cstddef>
#include <cstdint>

namespace missq {

/// |D_Mj ∩ D_Mk|.
std::uint64_t joint_missing_count(const IncompleteDataset& d, std::size_t j, std::size_t k);

/// |D_Mj ∩ D_Mk| / N.
double jm_magnitude(const IncompleteDataset& d, std::size_t j, std::size_t k);
/// Q_AM(j) · Q_AM(k), the joint fraction expected under independence.
double expected_jm(const IncompleteDataset& d, std::size_t j, std::size_t k);
/// jm_magnitude − expected_jm. Positive when the pair is missing together
/// more often than chance predicts.
double jm_directional(const IncompleteDataset& d, std::size_t j, std::size_t k);
/// |jm_directional|.
double jm_absolute(const IncompleteDataset& d, std::size_t j, std::size_t k);

/// The three metrics from raw counts. Each is a single rounding of the exact
/// rational, so results only depend on the counts.
double jm_magnitude_from_counts(std::uint64_t joint, std::uint64_t n);
double expected_jm_from_counts(std::uint64_t missing_j, std::uint64_t missing_k, std::uint64_t n);
double jm_directional_from_counts(std::uint64_t joint, std::uint64_t missing_j, std::uint64_t missing_k,
                                  std::uint64_t n);

struct JointMatrices {
    PairwiseQMMatrix magnitude;
    PairwiseQMMatrix directional;
    PairwiseQMMatrix absolute;

    const PairwiseQMMatrix& get(MetricId m) const;
};

/// All three matrices; support(j,k) = |D_Mj ∩ D_Mk|. The magnitude diagonal
/// holds Q_AM; the other diagonals are not applicable. Requires K >= 2.
JointMatrices jm_matrices(const IncompleteDataset& d);

}  // namespace missq
