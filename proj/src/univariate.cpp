#include "missq/univariate.hpp"

#include "missq/errors.hpp"

namespace missq {

std::vector<double> MissingnessProfile::q_am_values() const {
    std::vector<double> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.q_am);
    return out;
}

double amount_missing(const IncompleteDataset& d, std::size_t j) {
    const auto& v = d.variable(j);
    if (d.item_count() == 0) throw EmptyDatasetError();
    return static_cast<double>(v.missing_count()) / static_cast<double>(d.item_count());
}

MissingnessProfile profile(const IncompleteDataset& d) {
    if (d.item_count() == 0) throw EmptyDatasetError();
    MissingnessProfile p;
    p.item_count = d.item_count();
    std::size_t total = 0;
    for (std::size_t j = 0; j < d.variable_count(); ++j) {
        const auto& v = d.variable(j);
        p.entries.push_back({v.name(), amount_missing(d, j), v.missing_count(), v.recorded_count()});
        total += v.missing_count();
    }
    const std::size_t cells = d.variable_count() * d.item_count();
    p.total_missing_fraction = cells == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(cells);
    return p;
}

}  // namespace missq
