#include "missq/matrix.hpp"

#include "missq/errors.hpp"

#include <algorithm>
#include <array>
#include <cstring>

namespace missq {

namespace {
constexpr std::array<std::pair<MetricId, std::string_view>, 6> kMetricNames{{
    {MetricId::q_am, "q_am"},
    {MetricId::jm_mag, "jm_mag"},
    {MetricId::jm_dir, "jm_dir"},
    {MetricId::jm_abs, "jm_abs"},
    {MetricId::cm_did, "cm_did"},
    {MetricId::cm_h, "cm_h"},
}};
}  // namespace

std::string_view to_string(MetricId m) noexcept {
    for (const auto& [id, name] : kMetricNames)
        if (id == m) return name;
    return "unknown";
}

MetricId parse_metric(std::string_view text) {
    for (const auto& [id, name] : kMetricNames)
        if (name == text) return id;
    throw ValidationError("unknown metric '" + std::string(text) +
                          "' (expected q_am, jm_mag, jm_dir, jm_abs, cm_did or cm_h)");
}

bool is_pairwise(MetricId m) noexcept { return m != MetricId::q_am; }
bool is_conditional(MetricId m) noexcept { return m == MetricId::cm_did || m == MetricId::cm_h; }

std::string_view to_string(Aggregate a) noexcept {
    switch (a) {
        case Aggregate::max: return "max";
        case Aggregate::min: return "min";
        case Aggregate::avg: return "avg";
    }
    return "max";
}

Aggregate parse_aggregate(std::string_view text) {
    if (text == "max") return Aggregate::max;
    if (text == "min") return Aggregate::min;
    if (text == "avg") return Aggregate::avg;
    throw ValidationError("unknown aggregate '" + std::string(text) + "' (expected max, min or avg)");
}

PairwiseQMMatrix::PairwiseQMMatrix(MetricId metric, std::vector<std::string> variables)
    : metric_(metric), variables_(std::move(variables)) {
    if (metric == MetricId::q_am) throw ValidationError("q_am is not a pairwise metric");
    const std::size_t k = variables_.size();
    values_.assign(k * k, kNotApplicable);
    support_.assign(k * k, 0);
}

void PairwiseQMMatrix::set(std::size_t j, std::size_t k, double v, std::uint64_t support) {
    values_[j * size() + k] = v;
    support_[j * size() + k] = support;
}

double PairwiseQMMatrix::pair_value(std::size_t j, std::size_t k, Aggregate agg) const {
    if (symmetric()) return value(j, k);
    const double a = value(j, k);
    const double b = value(k, j);
    switch (agg) {
        case Aggregate::max: return std::max(a, b);
        case Aggregate::min: return std::min(a, b);
        case Aggregate::avg: return (a + b) / 2.0;
    }
    return std::max(a, b);
}

bool operator==(const PairwiseQMMatrix& a, const PairwiseQMMatrix& b) {
    if (a.metric_ != b.metric_ || a.variables_ != b.variables_ || a.support_ != b.support_) return false;
    // Bitwise comparison so NaN entries compare equal to themselves.
    return a.values_.size() == b.values_.size() &&
           std::memcmp(a.values_.data(), b.values_.data(), a.values_.size() * sizeof(double)) == 0;
}

}  // namespace missq
