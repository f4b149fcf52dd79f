#include "missq/missgen.hpp"

#include "missq/errors.hpp"
#include "missq/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace missq {

std::string_view to_string(GenMode m) noexcept {
    switch (m) {
        case GenMode::am: return "am";
        case GenMode::jm: return "jm";
        case GenMode::cm: return "cm";
    }
    return "am";
}

std::string_view to_string(JmPattern p) noexcept {
    switch (p) {
        case JmPattern::equal: return "equal";
        case JmPattern::above: return "above";
        case JmPattern::below: return "below";
    }
    return "equal";
}

std::string_view to_string(RangeType r) noexcept {
    switch (r) {
        case RangeType::low: return "low";
        case RangeType::medium: return "medium";
        case RangeType::high: return "high";
    }
    return "low";
}

GenMode parse_gen_mode(std::string_view text) {
    if (text == "am") return GenMode::am;
    if (text == "jm") return GenMode::jm;
    if (text == "cm") return GenMode::cm;
    throw ValidationError("unknown generator mode '" + std::string(text) + "' (expected am, jm or cm)");
}

JmPattern parse_jm_pattern(std::string_view text) {
    if (text == "equal") return JmPattern::equal;
    if (text == "above") return JmPattern::above;
    if (text == "below") return JmPattern::below;
    throw ValidationError("unknown JM pattern '" + std::string(text) + "' (expected equal, above or below)");
}

RangeType parse_range_type(std::string_view text) {
    if (text == "low") return RangeType::low;
    if (text == "medium") return RangeType::medium;
    if (text == "high") return RangeType::high;
    throw ValidationError("unknown condition range '" + std::string(text) + "' (expected low, medium or high)");
}

std::size_t target_count(std::size_t n, double fraction) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * fraction + 0.5));
}

namespace {

// Tolerance for the `equal` JM pattern: targets are usually quoted as whole
// tenths of a percent.
constexpr double kEqualPatternTolerance = 0.005;

std::string fmt(double v) {
    std::ostringstream s;
    s << v;
    return s.str();
}

void check_fraction(double v, const std::string& what) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(what + " = " + fmt(v) + " is outside [0, 1]");
}

void require_complete(const IncompleteDataset& d, std::size_t j) {
    const auto& v = d.variable(j);
    if (v.missing_count() != 0)
        throw ValidationError("variable '" + v.name() + "' already has " + std::to_string(v.missing_count()) +
                              " missing values; injection needs complete input");
}

class PairRegistry {
public:
    explicit PairRegistry(const IncompleteDataset& d) : d_(d) {}

    std::pair<std::size_t, std::size_t> claim(const std::string& a, const std::string& b) {
        const std::size_t j = d_.resolve(a);
        const std::size_t k = d_.resolve(b);
        if (j == k) throw ValidationError("pair uses variable '" + a + "' twice");
        for (auto x : {j, k})
            if (!used_.insert(x).second)
                throw ValidationError("variable '" + d_.variable(x).name() +
                                      "' appears in more than one pair; pairs must be disjoint");
        require_complete(d_, j);
        require_complete(d_, k);
        return {j, k};
    }

private:
    const IncompleteDataset& d_;
    std::set<std::size_t> used_;
};

std::vector<std::size_t> all_items(std::size_t n) {
    std::vector<std::size_t> v(n);
    std::iota(v.begin(), v.end(), std::size_t{0});
    return v;
}

GroundTruthManifest start_manifest(const IncompleteDataset& d, const MissingnessSpec& spec, GenMode mode) {
    GroundTruthManifest m;
    m.seed = spec.seed;
    m.mode = mode;
    m.source = d.name();
    m.item_count = d.item_count();
    return m;
}

Injection finish(const IncompleteDataset& source, std::vector<ItemSet> masks, GroundTruthManifest manifest) {
    std::vector<VariableColumn> cols;
    cols.reserve(source.variable_count());
    for (std::size_t j = 0; j < source.variable_count(); ++j) {
        const auto& v = source.variable(j);
        cols.push_back(masks[j].empty() ? v : v.with_missing(masks[j]));
    }
    IncompleteDataset out(source.name() + "_" + std::string(to_string(manifest.mode)), std::move(cols));
    for (const auto& v : out.variables()) manifest.missing_counts.emplace_back(v.name(), v.missing_count());
    return {std::move(out), std::move(manifest)};
}

std::vector<ItemSet> empty_masks(const IncompleteDataset& d) {
    return std::vector<ItemSet>(d.variable_count(), ItemSet(d.item_count()));
}

double resolve_p_jk(const JmPairSpec& p) {
    const double expected = p.p_j * p.p_k;
    if (p.p_jk) return *p.p_jk;
    switch (p.pattern) {
        case JmPattern::equal: return expected;
        case JmPattern::above: return (expected + std::min(p.p_j, p.p_k)) / 2.0;
        case JmPattern::below: return (expected + std::max(0.0, p.p_j + p.p_k - 1.0)) / 2.0;
    }
    return expected;
}

}  // namespace

Injection inject_am(const IncompleteDataset& complete, const MissingnessSpec& spec) {
    for (std::size_t j = 0; j < complete.variable_count(); ++j) require_complete(complete, j);
    check_fraction(spec.am_range_lo, "am range lower bound");
    check_fraction(spec.am_range_hi, "am range upper bound");
    if (spec.am_range_lo > spec.am_range_hi) throw ValidationError("am range lower bound exceeds upper bound");
    for (const auto& [name, frac] : spec.am_targets) {
        complete.resolve(name);
        check_fraction(frac, "am target for '" + name + "'");
    }

    Rng rng(spec.seed);
    const std::size_t n = complete.item_count();
    auto masks = empty_masks(complete);
    GroundTruthManifest manifest = start_manifest(complete, spec, GenMode::am);
    for (std::size_t j = 0; j < complete.variable_count(); ++j) {
        const auto& name = complete.variable(j).name();
        double target = 0.0;
        if (auto it = spec.am_targets.find(name); it != spec.am_targets.end()) target = it->second;
        else if (auto it2 = spec.am_targets.find(std::to_string(j)); it2 != spec.am_targets.end()) target = it2->second;
        else target = rng.uniform(spec.am_range_lo, spec.am_range_hi);
        const std::size_t m = target_count(n, target);
        auto pool = all_items(n);
        for (auto i : rng.sample(pool, m)) masks[j].insert(i);
        manifest.am.push_back({name, target, m});
    }
    return finish(complete, std::move(masks), std::move(manifest));
}

Injection inject_jm(const IncompleteDataset& complete, const MissingnessSpec& spec) {
    PairRegistry registry(complete);
    const std::size_t n = complete.item_count();
    struct Planned {
        std::size_t j, k, nj, nk, njk;
        double p_jk;
    };
    std::vector<Planned> plan;
    for (const auto& p : spec.jm_pairs) {
        const auto [j, k] = registry.claim(p.j, p.k);
        const std::string label = "'" + p.j + "'/'" + p.k + "'";
        check_fraction(p.p_j, "p_j for " + label);
        check_fraction(p.p_k, "p_k for " + label);
        const double p_jk = resolve_p_jk(p);
        check_fraction(p_jk, "p_jk for " + label);
        const double expected = p.p_j * p.p_k;

        if (p_jk > std::min(p.p_j, p.p_k))
            throw FeasibilityError("frechet_upper", "pair " + label + ": p_jk = " + fmt(p_jk) +
                                                        " exceeds min(p_j, p_k) = " + fmt(std::min(p.p_j, p.p_k)));
        if (p_jk < p.p_j + p.p_k - 1.0)
            throw FeasibilityError("frechet_lower", "pair " + label + ": p_j + p_k - p_jk = " +
                                                        fmt(p.p_j + p.p_k - p_jk) + " > 1");
        const bool consistent = p.pattern == JmPattern::equal ? std::fabs(p_jk - expected) <= kEqualPatternTolerance
                                : p.pattern == JmPattern::above ? p_jk > expected
                                                                : p_jk < expected;
        if (!consistent)
            throw FeasibilityError("pattern", "pair " + label + ": p_jk = " + fmt(p_jk) + " does not match pattern '" +
                                                  std::string(to_string(p.pattern)) + "' against p_j*p_k = " +
                                                  fmt(expected));

        const std::size_t nj = target_count(n, p.p_j);
        const std::size_t nk = target_count(n, p.p_k);
        const std::size_t njk = target_count(n, p_jk);
        if (njk > std::min(nj, nk))
            throw FeasibilityError("frechet_upper", "pair " + label + ": " + std::to_string(njk) +
                                                        " joint items exceed the individual counts after rounding");
        if (nj + nk - njk > n)
            throw FeasibilityError("disjoint_capacity", "pair " + label + ": needs " +
                                                            std::to_string(nj + nk - njk) + " distinct items, have " +
                                                            std::to_string(n));
        plan.push_back({j, k, nj, nk, njk, p_jk});
    }

    Rng rng(spec.seed);
    auto masks = empty_masks(complete);
    GroundTruthManifest manifest = start_manifest(complete, spec, GenMode::jm);
    for (std::size_t idx = 0; idx < plan.size(); ++idx) {
        const auto& pl = plan[idx];
        const auto& p = spec.jm_pairs[idx];
        auto pool = all_items(n);
        // One draw of the union; the first njk go to both, then j-only, then k-only.
        const auto chosen = rng.sample(pool, pl.nj + pl.nk - pl.njk);
        for (std::size_t t = 0; t < chosen.size(); ++t) {
            if (t < pl.njk) {
                masks[pl.j].insert(chosen[t]);
                masks[pl.k].insert(chosen[t]);
            } else if (t < pl.nj) {
                masks[pl.j].insert(chosen[t]);
            } else {
                masks[pl.k].insert(chosen[t]);
            }
        }
        const double nd = static_cast<double>(n);
        JmRecord r;
        r.j = complete.variable(pl.j).name();
        r.k = complete.variable(pl.k).name();
        r.pattern = p.pattern;
        r.target_p_j = p.p_j;
        r.target_p_k = p.p_k;
        r.target_p_jk = pl.p_jk;
        r.missing_j = pl.nj;
        r.missing_k = pl.nk;
        r.joint = pl.njk;
        r.residual_p_j = n ? p.p_j - static_cast<double>(pl.nj) / nd : 0.0;
        r.residual_p_k = n ? p.p_k - static_cast<double>(pl.nk) / nd : 0.0;
        r.residual_p_jk = n ? pl.p_jk - static_cast<double>(pl.njk) / nd : 0.0;
        manifest.jm.push_back(std::move(r));
    }
    return finish(complete, std::move(masks), std::move(manifest));
}

ConditionRange condition_range(const IncompleteDataset& d, std::size_t k, RangeType type) {
    const auto& v = d.variable(k);
    std::vector<std::size_t> items = v.recorded().indices();
    if (items.empty()) throw NoSupportError("condition variable '" + v.name() + "' has no recorded values");
    const bool numeric = v.kind() == VariableKind::numerical;
    // Categorical codes follow sorted label order, so comparing codes orders labels.
    auto key = [&](std::size_t i) { return numeric ? v.numbers()[i] : static_cast<double>(v.codes()[i]); };
    std::stable_sort(items.begin(), items.end(), [&](std::size_t a, std::size_t b) { return key(a) < key(b); });

    const std::size_t n = items.size();
    const std::size_t c1 = (n + 2) / 3;
    const std::size_t c2 = (2 * n + 2) / 3;
    const double t1 = key(items[c1 - 1]);
    const double t2 = key(items[c2 - 1]);
    auto in_third = [&](double x) {
        switch (type) {
            case RangeType::low: return x <= t1;
            case RangeType::medium: return x > t1 && x <= t2;
            case RangeType::high: return x > t2;
        }
        return false;
    };

    ConditionRange out{0.0, 0.0, ItemSet(d.item_count())};
    double lo = 0.0;
    double hi = 0.0;
    bool any = false;
    for (auto i : items) {
        const double x = key(i);
        if (!in_third(x)) continue;
        out.inside.insert(i);
        if (!any || x < lo) lo = x;
        if (!any || x > hi) hi = x;
        any = true;
    }
    if (any) {
        if (numeric) {
            out.lo = lo;
            out.hi = hi;
        } else {
            out.lo = v.categories()[static_cast<std::size_t>(lo)];
            out.hi = v.categories()[static_cast<std::size_t>(hi)];
        }
    } else if (!numeric) {
        out.lo = std::string{};
        out.hi = std::string{};
    }
    return out;
}

Injection inject_cm(const IncompleteDataset& complete, const MissingnessSpec& spec) {
    PairRegistry registry(complete);
    const std::size_t n = complete.item_count();
    struct Planned {
        std::size_t j, k, m, n_in;
        ConditionRange range;
    };
    std::vector<Planned> plan;
    for (const auto& p : spec.cm_pairs) {
        const auto [j, k] = registry.claim(p.j, p.k);
        const std::string label = "'" + p.j + "'/'" + p.k + "'";
        check_fraction(p.am_j, "am_j for " + label);
        check_fraction(p.strength, "strength for " + label);
        ConditionRange range = condition_range(complete, k, p.range_type);
        const std::size_t m = target_count(n, p.am_j);
        const std::size_t n_in = target_count(m, p.strength);
        const std::size_t inside = range.inside.size();
        if (inside < n_in)
            throw FeasibilityError("inside_capacity", "pair " + label + ": condition range holds " +
                                                          std::to_string(inside) + " items, " + std::to_string(n_in) +
                                                          " must be missing inside it");
        if (n - inside < m - n_in)
            throw FeasibilityError("outside_capacity", "pair " + label + ": " + std::to_string(n - inside) +
                                                           " items lie outside the condition range, " +
                                                           std::to_string(m - n_in) + " must be missing there");
        plan.push_back({j, k, m, n_in, std::move(range)});
    }

    Rng rng(spec.seed);
    auto masks = empty_masks(complete);
    GroundTruthManifest manifest = start_manifest(complete, spec, GenMode::cm);
    for (std::size_t idx = 0; idx < plan.size(); ++idx) {
        const auto& pl = plan[idx];
        const auto& p = spec.cm_pairs[idx];
        auto inside = pl.range.inside.indices();
        auto outside = pl.range.inside.complement().indices();
        for (auto i : rng.sample(inside, pl.n_in)) masks[pl.j].insert(i);
        for (auto i : rng.sample(outside, pl.m - pl.n_in)) masks[pl.j].insert(i);
        CmRecord r;
        r.j = complete.variable(pl.j).name();
        r.k = complete.variable(pl.k).name();
        r.range_type = p.range_type;
        r.strength = p.strength;
        r.am_j = p.am_j;
        r.interval_lo = pl.range.lo;
        r.interval_hi = pl.range.hi;
        r.inside_items = pl.range.inside.size();
        r.missing_j = pl.m;
        r.in_range = pl.n_in;
        r.out_of_range = pl.m - pl.n_in;
        manifest.cm.push_back(std::move(r));
    }
    return finish(complete, std::move(masks), std::move(manifest));
}

Injection inject(const IncompleteDataset& complete, const MissingnessSpec& spec) {
    switch (spec.mode) {
        case GenMode::am: return inject_am(complete, spec);
        case GenMode::jm: return inject_jm(complete, spec);
        case GenMode::cm: return inject_cm(complete, spec);
    }
    throw ValidationError("unknown generator mode");
}

namespace {

bool inside_interval(const VariableColumn& v, std::size_t i, const IntervalBound& lo, const IntervalBound& hi) {
    if (v.kind() == VariableKind::numerical) {
        const double x = v.numbers()[i];
        return std::holds_alternative<double>(lo) && x >= std::get<double>(lo) && x <= std::get<double>(hi);
    }
    const auto& label = v.categories()[v.codes()[i]];
    return std::holds_alternative<std::string>(lo) && label >= std::get<std::string>(lo) &&
           label <= std::get<std::string>(hi);
}

}  // namespace

std::vector<std::string> verify_manifest(const IncompleteDataset& d, const GroundTruthManifest& manifest) {
    std::vector<std::string> problems;
    auto expect = [&](const std::string& what, std::size_t want, std::size_t got) {
        if (want != got)
            problems.push_back(what + ": manifest " + std::to_string(want) + ", dataset " + std::to_string(got));
    };
    expect("item count", manifest.item_count, d.item_count());
    for (const auto& [name, count] : manifest.missing_counts) {
        const auto j = d.index_of(name);
        if (!j) {
            problems.push_back("variable '" + name + "' missing from dataset");
            continue;
        }
        expect("missing count of '" + name + "'", count, d.variable(*j).missing_count());
    }
    for (const auto& r : manifest.am) {
        if (auto j = d.index_of(r.variable)) expect("am count of '" + r.variable + "'", r.missing, d.variable(*j).missing_count());
    }
    for (const auto& r : manifest.jm) {
        const auto j = d.index_of(r.j);
        const auto k = d.index_of(r.k);
        if (!j || !k) {
            problems.push_back("jm pair '" + r.j + "'/'" + r.k + "' not in dataset");
            continue;
        }
        expect("missing count of '" + r.j + "'", r.missing_j, d.variable(*j).missing_count());
        expect("missing count of '" + r.k + "'", r.missing_k, d.variable(*k).missing_count());
        expect("joint count of '" + r.j + "'/'" + r.k + "'", r.joint,
               d.missing_set(*j).intersection_size(d.missing_set(*k)));
    }
    for (const auto& r : manifest.cm) {
        const auto j = d.index_of(r.j);
        const auto k = d.index_of(r.k);
        if (!j || !k) {
            problems.push_back("cm pair '" + r.j + "'/'" + r.k + "' not in dataset");
            continue;
        }
        const auto& vk = d.variable(*k);
        std::size_t in = 0;
        std::size_t out = 0;
        d.missing_set(*j).for_each([&](std::size_t i) {
            if (vk.is_missing(i)) return;
            if (inside_interval(vk, i, r.interval_lo, r.interval_hi)) ++in;
            else ++out;
        });
        expect("missing count of '" + r.j + "'", r.missing_j, d.variable(*j).missing_count());
        expect("condition variable '" + r.k + "' missing count", 0, vk.missing_count());
        expect("in-range count of '" + r.j + "'/'" + r.k + "'", r.in_range, in);
        expect("out-of-range count of '" + r.j + "'/'" + r.k + "'", r.out_of_range, out);
    }
    return problems;
}

}  // namespace missq
