#include "missq/ordering.hpp"

#include "missq/errors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace missq {

bool is_permutation(std::span<const std::size_t> p) {
    std::vector<char> seen(p.size(), 0);
    for (auto v : p) {
        if (v >= p.size() || seen[v]) return false;
        seen[v] = 1;
    }
    return true;
}

VariableOrdering order_by_univariate(const MissingnessProfile& profile, bool descending) {
    VariableOrdering o;
    o.metric = MetricId::q_am;
    o.permutation.resize(profile.entries.size());
    std::iota(o.permutation.begin(), o.permutation.end(), std::size_t{0});
    std::stable_sort(o.permutation.begin(), o.permutation.end(), [&](std::size_t a, std::size_t b) {
        return descending ? profile.entries[a].q_am > profile.entries[b].q_am
                          : profile.entries[a].q_am < profile.entries[b].q_am;
    });
    if (o.permutation.size() >= 2) o.anchor_pair = {o.permutation[0], o.permutation[1]};
    else if (o.permutation.size() == 1) o.anchor_pair = {o.permutation[0], o.permutation[0]};
    return o;
}

VariableOrdering order_by_pairwise(const PairwiseQMMatrix& matrix, Aggregate aggregate) {
    const std::size_t k_vars = matrix.size();
    if (k_vars < 2) throw TooFewVariablesError(k_vars);

    constexpr double kLowest = -std::numeric_limits<double>::infinity();
    auto weight = [&](std::size_t a, std::size_t b) {
        const double v = matrix.pair_value(a, b, aggregate);
        return std::isnan(v) ? kLowest : v;
    };

    std::size_t seed_a = 0;
    std::size_t seed_b = 1;
    double best = weight(0, 1);
    for (std::size_t j = 0; j < k_vars; ++j)
        for (std::size_t k = j + 1; k < k_vars; ++k)
            if (weight(j, k) > best) {
                best = weight(j, k);
                seed_a = j;
                seed_b = k;
            }

    std::deque<std::size_t> seq{seed_a, seed_b};
    std::vector<char> placed(k_vars, 0);
    placed[seed_a] = placed[seed_b] = 1;
    for (std::size_t step = 2; step < k_vars; ++step) {
        std::size_t pick = k_vars;
        bool pick_left = true;
        double pick_value = kLowest;
        for (std::size_t u = 0; u < k_vars; ++u) {
            if (placed[u]) continue;
            const double left = weight(u, seq.front());
            const double right = weight(u, seq.back());
            const double v = std::max(left, right);
            if (pick == k_vars || v > pick_value) {
                pick = u;
                pick_value = v;
                pick_left = left >= right;
            }
        }
        placed[pick] = 1;
        if (pick_left) seq.push_front(pick);
        else seq.push_back(pick);
    }

    VariableOrdering o;
    o.metric = matrix.metric();
    o.permutation.assign(seq.begin(), seq.end());
    o.anchor_pair = {seed_a, seed_b};
    return o;
}

namespace {

struct Ranked {
    std::size_t index;
    double value;
};

std::vector<std::size_t> rank(std::vector<Ranked> items, std::optional<std::size_t> top_n) {
    std::stable_sort(items.begin(), items.end(), [](const Ranked& a, const Ranked& b) { return a.value > b.value; });
    if (top_n && items.size() > *top_n) items.resize(*top_n);
    std::vector<std::size_t> out;
    out.reserve(items.size());
    for (const auto& r : items) out.push_back(r.index);
    return out;
}

void check_threshold(const std::optional<Comparison>& c) {
    if (c && !std::isfinite(c->threshold)) throw ValidationError("threshold must be finite");
}

}  // namespace

std::vector<std::size_t> threshold_select(const MissingnessProfile& profile, std::optional<Comparison> comparison,
                                          std::optional<std::size_t> top_n) {
    check_threshold(comparison);
    std::vector<Ranked> items;
    for (std::size_t j = 0; j < profile.entries.size(); ++j)
        if (!comparison || (*comparison)(profile.entries[j].q_am)) items.push_back({j, profile.entries[j].q_am});
    return rank(std::move(items), top_n);
}

std::vector<std::size_t> threshold_select(const QualityMatrices& matrices, MetricId metric,
                                          std::optional<Comparison> comparison, std::optional<std::size_t> top_n) {
    check_threshold(comparison);
    EdgeFilter filter;
    if (comparison) filter.predicates.push_back({metric, *comparison});
    else filter.predicates.push_back({metric, {CompareOp::greater_equal, -std::numeric_limits<double>::max()}});
    return threshold_select(matrices, filter, top_n);
}

std::vector<std::size_t> threshold_select(const QualityMatrices& matrices, const EdgeFilter& filter,
                                          std::optional<std::size_t> top_n) {
    if (filter.predicates.empty()) throw ValidationError("pairwise selection needs at least one predicate");
    for (const auto& p : filter.predicates) check_threshold(p.comparison);
    const auto edges = filter_edges(matrices, filter);
    const auto& ranking = matrices.get(filter.predicates.front().metric);
    const std::size_t k_vars = matrices.size();
    std::vector<double> best(k_vars, -std::numeric_limits<double>::infinity());
    std::vector<char> hit(k_vars, 0);
    for (auto [j, k] : edges) {
        const double v = ranking.pair_value(j, k, matrices.aggregate());
        for (auto x : {j, k}) {
            hit[x] = 1;
            best[x] = std::max(best[x], v);
        }
    }
    std::vector<Ranked> items;
    for (std::size_t j = 0; j < k_vars; ++j)
        if (hit[j]) items.push_back({j, best[j]});
    return rank(std::move(items), top_n);
}

}  // namespace missq
