#include "missq/errors.hpp"
#include "missq/joint.hpp"
#include "missq/json_io.hpp"
#include "missq/missgen.hpp"
#include "missq/univariate.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

using namespace missq;

namespace {

// Recorded values outside the masks must be untouched.
void expect_mask_only(const IncompleteDataset& before, const IncompleteDataset& after) {
    ASSERT_EQ(before.variable_count(), after.variable_count());
    for (std::size_t j = 0; j < before.variable_count(); ++j)
        for (std::size_t i = 0; i < before.item_count(); ++i)
            if (!after.variable(j).is_missing(i)) {
                ASSERT_EQ(after.variable(j).label(i), before.variable(j).label(i));
            }
}

std::string bound_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const FeasibilityError& e) {
        return e.bound();
    }
    return "";
}

}  // namespace

TEST(TargetCount, HalfUp) {
    EXPECT_EQ(target_count(100, 0.3), 30u);
    EXPECT_EQ(target_count(116, 0.036), 4u);
    EXPECT_EQ(target_count(116, 0.383), 44u);
    EXPECT_EQ(target_count(10, 0.25), 3u);
    EXPECT_EQ(target_count(10, 0.0), 0u);
    EXPECT_EQ(target_count(10, 1.0), 10u);
}

TEST(InjectAm, ZeroTargetsLeaveDataUnchanged) {
    const auto d = fixtures::coimbra_like();
    MissingnessSpec spec;
    spec.am_range_hi = 0.0;
    const auto gen = inject_am(d, spec);
    EXPECT_EQ(gen.dataset.total_missing(), 0u);
    expect_mask_only(d, gen.dataset);
    EXPECT_EQ(gen.dataset.name(), "coimbra_like_am");
}

TEST(InjectAm, ExactCountsFromTargets) {
    const auto d = fixtures::normal_table(100, 3, 1);
    MissingnessSpec spec;
    spec.am_targets = {{"V0", 0.3}, {"1", 0.05}};
    spec.am_range_lo = spec.am_range_hi = 0.5;
    const auto gen = inject_am(d, spec);
    EXPECT_EQ(gen.dataset.variable(0).missing_count(), 30u);
    EXPECT_EQ(gen.dataset.variable(1).missing_count(), 5u);
    EXPECT_EQ(gen.dataset.variable(2).missing_count(), 50u);
    EXPECT_EQ(amount_missing(gen.dataset, 0), 0.3);
    EXPECT_TRUE(verify_manifest(gen.dataset, gen.manifest).empty());
    expect_mask_only(d, gen.dataset);
}

TEST(InjectAm, DrawnTargetsRespectRange) {
    const auto d = fixtures::coimbra_like();
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        MissingnessSpec spec;
        spec.seed = seed;
        const auto gen = inject_am(d, spec);
        for (std::size_t j = 0; j < 10; ++j) {
            EXPECT_LE(oracle::q_am(gen.dataset, j), 0.5 + 0.5 / 116);
            EXPECT_GE(gen.manifest.am[j].target, 0.0);
            EXPECT_LE(gen.manifest.am[j].target, 0.5);
        }
    }
}

TEST(InjectAm, Errors) {
    const auto d = fixtures::normal_table(10, 2, 1);
    MissingnessSpec spec;
    spec.am_targets = {{"V0", 1.2}};
    EXPECT_THROW(inject_am(d, spec), ValidationError);
    spec.am_targets = {{"nope", 0.2}};
    EXPECT_THROW(inject_am(d, spec), ValidationError);
    spec.am_targets.clear();
    spec.am_range_lo = 0.4;
    spec.am_range_hi = 0.2;
    EXPECT_THROW(inject_am(d, spec), ValidationError);
    // Input that already has missing values.
    MissingnessSpec ok;
    ok.am_targets = {{"V0", 0.5}};
    const auto once = inject_am(d, ok).dataset;
    EXPECT_THROW(inject_am(once, ok), ValidationError);
}

TEST(InjectJm, TableOnePairsReachTargets) {
    const auto gen = inject_jm(fixtures::coimbra_like(), fixtures::breast_cancer_jm_spec());
    const auto& d = gen.dataset;
    EXPECT_TRUE(verify_manifest(d, gen.manifest).empty());
    ASSERT_EQ(gen.manifest.jm.size(), 5u);
    for (const auto& r : gen.manifest.jm) {
        const auto j = *d.index_of(r.j);
        const auto k = *d.index_of(r.k);
        EXPECT_EQ(d.variable(j).missing_count(), target_count(116, r.target_p_j));
        EXPECT_EQ(d.variable(k).missing_count(), target_count(116, r.target_p_k));
        EXPECT_EQ(oracle::joint_count(d, j, k), target_count(116, r.target_p_jk));
        EXPECT_EQ(r.joint, oracle::joint_count(d, j, k));
        EXPECT_NEAR(r.residual_p_jk, r.target_p_jk - jm_magnitude(d, j, k), 1e-15);
    }
    const auto homa = *d.index_of("HOMA");
    const auto leptin = *d.index_of("Leptin");
    EXPECT_NEAR(jm_directional(d, homa, leptin), 0.0, 0.005);
    EXPECT_NEAR(jm_directional(d, *d.index_of("MCP_1"), *d.index_of("Classification")), 0.151, 0.01);
    EXPECT_EQ(gen.dataset.name(), "coimbra_like_jm");
}

TEST(InjectJm, DefaultJointFractions) {
    MissingnessSpec spec;
    spec.mode = GenMode::jm;
    spec.jm_pairs = {{"V0", "V1", 0.26, 0.41, JmPattern::equal, std::nullopt},
                     {"V2", "V3", 0.4, 0.4, JmPattern::above, std::nullopt},
                     {"V4", "V5", 0.4, 0.4, JmPattern::below, std::nullopt}};
    const auto gen = inject_jm(fixtures::normal_table(1000, 6, 2), spec);
    EXPECT_NEAR(gen.manifest.jm[0].target_p_jk, 0.26 * 0.41, 1e-15);
    EXPECT_NEAR(gen.manifest.jm[1].target_p_jk, (0.16 + 0.4) / 2, 1e-15);
    EXPECT_NEAR(gen.manifest.jm[2].target_p_jk, 0.08, 1e-15);
    EXPECT_GT(jm_directional(gen.dataset, 2, 3), 0.0);
    EXPECT_LT(jm_directional(gen.dataset, 4, 5), 0.0);
}

TEST(InjectJm, FeasibilityErrorsNameTheBound) {
    const auto d = fixtures::normal_table(100, 4, 1);
    auto attempt = [&](double pj, double pk, JmPattern pat, std::optional<double> pjk) {
        MissingnessSpec spec;
        spec.jm_pairs = {{"V0", "V1", pj, pk, pat, pjk}};
        return bound_of([&] { inject_jm(d, spec); });
    };
    EXPECT_EQ(attempt(0.6, 0.6, JmPattern::below, 0.1), "frechet_lower");
    EXPECT_EQ(attempt(0.2, 0.3, JmPattern::above, 0.25), "frechet_upper");
    EXPECT_EQ(attempt(0.5, 0.5, JmPattern::above, 0.2), "pattern");
    EXPECT_EQ(attempt(0.5, 0.5, JmPattern::equal, 0.3), "pattern");
    EXPECT_EQ(attempt(0.5, 0.5, JmPattern::equal, 0.25), "");
}

TEST(InjectJm, PairsMustBeDisjointAndKnown) {
    const auto d = fixtures::normal_table(50, 4, 1);
    MissingnessSpec spec;
    spec.jm_pairs = {{"V0", "V1", 0.2, 0.2, JmPattern::equal, std::nullopt},
                     {"V1", "V2", 0.2, 0.2, JmPattern::equal, std::nullopt}};
    EXPECT_THROW(inject_jm(d, spec), ValidationError);
    spec.jm_pairs = {{"V0", "V0", 0.2, 0.2, JmPattern::equal, std::nullopt}};
    EXPECT_THROW(inject_jm(d, spec), ValidationError);
    spec.jm_pairs = {{"V0", "zz", 0.2, 0.2, JmPattern::equal, std::nullopt}};
    EXPECT_THROW(inject_jm(d, spec), ValidationError);
}

TEST(ConditionRange, BinaryClassificationLowIsOne) {
    const auto d = fixtures::coimbra_like();
    const auto r = condition_range(d, *d.index_of("Classification"), RangeType::low);
    EXPECT_EQ(std::get<double>(r.lo), 1.0);
    EXPECT_EQ(std::get<double>(r.hi), 1.0);
    EXPECT_EQ(r.inside.size(), 52u);
}

TEST(ConditionRange, TertilesPartitionItems) {
    const auto d = fixtures::coimbra_like();
    for (std::size_t k = 0; k < d.variable_count(); ++k) {
        const auto lo = condition_range(d, k, RangeType::low);
        const auto mid = condition_range(d, k, RangeType::medium);
        const auto hi = condition_range(d, k, RangeType::high);
        EXPECT_TRUE((lo.inside & mid.inside).empty());
        EXPECT_TRUE((mid.inside & hi.inside).empty());
        EXPECT_EQ(lo.inside.size() + mid.inside.size() + hi.inside.size(), 116u);
        if (k != 9) {
            EXPECT_GE(lo.inside.size(), 39u);
        }
    }
}

TEST(ConditionRange, CategoricalUsesLabelOrder) {
    const IncompleteDataset d("c", {fixtures::label_column("x", {"b", "a", "c", "a", "b", "c"})});
    const auto r = condition_range(d, 0, RangeType::low);
    EXPECT_EQ(std::get<std::string>(r.lo), "a");
    EXPECT_EQ(std::get<std::string>(r.hi), "a");
    EXPECT_EQ(r.inside.indices(), (std::vector<std::size_t>{1, 3}));
    EXPECT_EQ(std::get<std::string>(condition_range(d, 0, RangeType::high).lo), "c");
}

TEST(InjectCm, StrengthOnePutsEveryMissingItemInRange) {
    const auto d = fixtures::normal_table(200, 2, 5);
    MissingnessSpec spec;
    spec.cm_pairs = {{"V0", "V1", 0.1, RangeType::high, 1.0}};
    const auto gen = inject_cm(d, spec);
    const auto range = condition_range(gen.dataset, 1, RangeType::high);
    EXPECT_EQ(gen.dataset.variable(0).missing_count(), 20u);
    EXPECT_EQ(gen.dataset.missing_set(0).intersection_size(range.inside), 20u);
    EXPECT_EQ(gen.dataset.variable(1).missing_count(), 0u);
    EXPECT_EQ(gen.manifest.cm[0].in_range, 20u);
    EXPECT_EQ(gen.manifest.cm[0].out_of_range, 0u);
}

TEST(InjectCm, TableTwoPairs) {
    const auto gen = inject_cm(fixtures::coimbra_like(), fixtures::breast_cancer_cm_spec());
    const auto& d = gen.dataset;
    EXPECT_TRUE(verify_manifest(d, gen.manifest).empty());
    for (const auto& r : gen.manifest.cm) {
        EXPECT_EQ(d.variable(*d.index_of(r.k)).missing_count(), 0u);
        const auto m = target_count(116, r.am_j);
        EXPECT_EQ(r.missing_j, m);
        EXPECT_EQ(r.in_range, target_count(m, r.strength));
        EXPECT_EQ(r.in_range + r.out_of_range, m);
    }
    const auto& mcp = gen.manifest.cm[4];
    EXPECT_EQ(std::get<double>(mcp.interval_lo), 1.0);
    EXPECT_EQ(std::get<double>(mcp.interval_hi), 1.0);
    expect_mask_only(fixtures::coimbra_like(), d);
}

TEST(InjectCm, CapacityErrors) {
    const auto d = fixtures::normal_table(30, 2, 5);
    MissingnessSpec spec;
    spec.cm_pairs = {{"V0", "V1", 0.9, RangeType::low, 1.0}};
    EXPECT_EQ(bound_of([&] { inject_cm(d, spec); }), "inside_capacity");
    spec.cm_pairs = {{"V0", "V1", 0.9, RangeType::low, 0.0}};
    EXPECT_EQ(bound_of([&] { inject_cm(d, spec); }), "outside_capacity");
    spec.cm_pairs = {{"V0", "V1", 0.2, RangeType::low, 1.5}};
    EXPECT_THROW(inject_cm(d, spec), ValidationError);
}

TEST(Inject, DeterministicAndByteIdentical) {
    const auto d = fixtures::coimbra_like();
    for (auto spec : {fixtures::breast_cancer_jm_spec(11), fixtures::breast_cancer_cm_spec(11)}) {
        const auto a = inject(d, spec);
        const auto b = inject(d, spec);
        EXPECT_EQ(to_csv_string(a.dataset), to_csv_string(b.dataset));
        EXPECT_EQ(to_json(a.manifest).dump(), to_json(b.manifest).dump());
        spec.seed += 1;
        EXPECT_NE(to_csv_string(inject(d, spec).dataset), to_csv_string(a.dataset));
    }
    MissingnessSpec am;
    am.seed = 4;
    EXPECT_EQ(to_csv_string(inject(d, am).dataset), to_csv_string(inject(d, am).dataset));
}

TEST(Inject, ChainedStructuresKeepEarlierMasks) {
    // AM on some variables, then JM and CM on still-complete ones.
    auto d = fixtures::normal_table(300, 8, 3);
    MissingnessSpec am;
    am.am_targets = {{"V0", 0.3}, {"V1", 0.2}};
    am.am_range_lo = am.am_range_hi = 0.0;
    d = inject_am(d, am).dataset;
    MissingnessSpec jm;
    jm.jm_pairs = {{"V2", "V3", 0.3, 0.3, JmPattern::above, 0.25}};
    d = inject_jm(d, jm).dataset;
    MissingnessSpec cm;
    cm.cm_pairs = {{"V4", "V5", 0.3, RangeType::low, kHighCm}};
    const auto gen = inject_cm(d, cm);
    EXPECT_EQ(gen.dataset.variable(0).missing_count(), 90u);
    EXPECT_EQ(gen.dataset.variable(2).missing_count(), 90u);
    EXPECT_EQ(gen.dataset.variable(4).missing_count(), 90u);
    // A pair variable that already has missing values is refused.
    MissingnessSpec bad;
    bad.cm_pairs = {{"V0", "V6", 0.1, RangeType::low, kLowCm}};
    EXPECT_THROW(inject_cm(gen.dataset, bad), ValidationError);
}

TEST(VerifyManifest, ReportsTampering) {
    auto gen = inject_jm(fixtures::coimbra_like(), fixtures::breast_cancer_jm_spec());
    gen.manifest.jm[0].joint += 1;
    gen.manifest.missing_counts[3].second += 2;
    EXPECT_EQ(verify_manifest(gen.dataset, gen.manifest).size(), 2u);
}

TEST(SpecJson, RoundTripAndErrors) {
    const auto spec = fixtures::breast_cancer_cm_spec(99);
    const auto back = spec_from_json(to_json(spec));
    EXPECT_EQ(to_json(back).dump(), to_json(spec).dump());
    const auto parsed = spec_from_json(Json::parse(R"({
        "seed": 5, "mode": "jm",
        "jm_pairs": [{"j": "Age", "k": "BMI", "p_j": 0.32, "p_k": 0.34, "pattern": "below", "p_jk": 0.036}]
    })"));
    EXPECT_EQ(parsed.mode, GenMode::jm);
    EXPECT_EQ(*parsed.jm_pairs[0].p_jk, 0.036);
    const auto strength = spec_from_json(Json::parse(R"({"mode": "cm",
        "cm_pairs": [{"j": 0, "k": 1, "am_j": 0.2, "range_type": "high", "strength": "medium"}]})"));
    EXPECT_EQ(strength.cm_pairs[0].strength, kMediumCm);
    EXPECT_EQ(strength.cm_pairs[0].j, "0");
    EXPECT_THROW(spec_from_json(Json::parse(R"({"mode": "xx"})")), ValidationError);
    EXPECT_THROW(spec_from_json(Json::parse(R"({"mode": "jm", "jm_pairs": [{"j": "a"}]})")), ValidationError);
    EXPECT_THROW(spec_from_json(Json::parse(R"([1, 2])")), ValidationError);
}
