#pragma once

#include "missq/dataset.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace missq {

struct ProfileEntry {
    std::string variable;
    double q_am = 0.0;
    std::size_t missing_count = 0;
    std::size_t recorded_count = 0;
};

/// Per-variable Amount Missing plus the dataset-level missing fraction.
struct MissingnessProfile {
    std::size_t item_count = 0;
    std::vector<ProfileEntry> entries;
    double total_missing_fraction = 0.0;

    std::vector<double> q_am_values() const;
};

/// |D_Mj| / N. Throws EmptyDatasetError for N = 0.
double amount_missing(const IncompleteDataset& d, std::size_t j);

MissingnessProfile profile(const IncompleteDataset& d);

}  // namespace missq
