#include "missq/filter.hpp"

#include "missq/errors.hpp"
#include "missq/quality.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace missq {

std::string_view to_string(CompareOp op) noexcept {
    switch (op) {
        case CompareOp::less: return "<";
        case CompareOp::less_equal: return "<=";
        case CompareOp::greater: return ">";
        case CompareOp::greater_equal: return ">=";
    }
    return "?";
}

CompareOp parse_compare_op(std::string_view text) {
    if (text == "<" || text == "lt") return CompareOp::less;
    if (text == "<=" || text == "le") return CompareOp::less_equal;
    if (text == ">" || text == "gt") return CompareOp::greater;
    if (text == ">=" || text == "ge") return CompareOp::greater_equal;
    throw ValidationError("unknown comparison '" + std::string(text) + "' (expected <, <=, > or >=)");
}

bool Comparison::operator()(double value) const noexcept {
    if (std::isnan(value)) return false;
    switch (op) {
        case CompareOp::less: return value < threshold;
        case CompareOp::less_equal: return value <= threshold;
        case CompareOp::greater: return value > threshold;
        case CompareOp::greater_equal: return value >= threshold;
    }
    return false;
}

std::string Predicate::to_string() const {
    return std::string(missq::to_string(metric)) + std::string(missq::to_string(comparison.op)) +
           format_threshold(comparison.threshold);
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

}  // namespace

std::string format_threshold(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

Predicate parse_predicate(std::string_view text) {
    const std::string_view original = text;
    text = trim(text);
    const auto pos = text.find_first_of("<>");
    if (pos == std::string_view::npos)
        throw ValidationError("predicate '" + std::string(original) + "' needs one of <, <=, >, >=");
    Predicate p;
    p.metric = parse_metric(trim(text.substr(0, pos)));
    if (!is_pairwise(p.metric))
        throw ValidationError("predicate '" + std::string(original) + "' must use a pairwise metric");
    std::string_view rest = text.substr(pos);
    const bool orequal = rest.size() > 1 && rest[1] == '=';
    p.comparison.op = rest[0] == '<' ? (orequal ? CompareOp::less_equal : CompareOp::less)
                                     : (orequal ? CompareOp::greater_equal : CompareOp::greater);
    rest = trim(rest.substr(orequal ? 2 : 1));
    if (!rest.empty() && rest.front() == '+') rest.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), value);
    if (rest.empty() || ec != std::errc{} || ptr != rest.data() + rest.size() || !std::isfinite(value))
        throw ValidationError("predicate '" + std::string(original) + "' has no finite threshold");
    p.comparison.threshold = value;
    return p;
}

EdgeFilter EdgeFilter::parse(std::string_view text) {
    EdgeFilter f;
    if (trim(text).empty()) return f;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        const auto part = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
        f.predicates.push_back(parse_predicate(part));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return f;
}

std::string EdgeFilter::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < predicates.size(); ++i) {
        if (i) out += ',';
        out += predicates[i].to_string();
    }
    return out;
}

void EdgeFilter::check_available(const QualityMatrices& q) const {
    for (const auto& p : predicates) {
        if (!is_pairwise(p.metric))
            throw ValidationError("edge predicates need a pairwise metric, got '" +
                                  std::string(missq::to_string(p.metric)) + "'");
        q.get(p.metric);
    }
}

bool EdgeFilter::accepts(const QualityMatrices& q, std::size_t j, std::size_t k) const {
    for (const auto& p : predicates)
        if (!p.comparison(q.get(p.metric).pair_value(j, k, q.aggregate()))) return false;
    return true;
}

std::vector<std::pair<std::size_t, std::size_t>> filter_edges(const QualityMatrices& q, const EdgeFilter& filter) {
    filter.check_available(q);
    std::vector<std::pair<std::size_t, std::size_t>> out;
    const std::size_t k_vars = q.size();
    for (std::size_t j = 0; j < k_vars; ++j)
        for (std::size_t k = j + 1; k < k_vars; ++k)
            if (filter.accepts(q, j, k)) out.emplace_back(j, k);
    return out;
}

}  // namespace missq
