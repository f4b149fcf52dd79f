#include "missq/errors.hpp"
#include "missq/export.hpp"
#include "missq/joint.hpp"
#include "missq/json_io.hpp"
#include "missq/missgen.hpp"
#include "missq/quality.hpp"
#include "missq/univariate.hpp"
#include "support/fixtures.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace missq;

namespace {

std::size_t data_rows(const std::string& csv) {
    return static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) - 1;
}

const IncompleteDataset& jm_dataset() {
    static const auto d = inject_jm(fixtures::coimbra_like(), fixtures::breast_cancer_jm_spec()).dataset;
    return d;
}

std::vector<std::pair<std::size_t, std::size_t>> edge_pairs(const NetworkExport& net) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& e : net.edges) out.emplace_back(e.source, e.target);
    return out;
}

}  // namespace

TEST(ExportNetwork, UnfilteredHasEveryPair) {
    const auto& d = jm_dataset();
    const auto net = export_network(profile(d), compute_quality_matrices(d));
    EXPECT_EQ(net.nodes.size(), 10u);
    EXPECT_EQ(net.edges.size(), 45u);
    for (const auto& e : net.edges) {
        EXPECT_LT(e.source, e.target);
        EXPECT_LT(e.target, 10u);
    }
}

TEST(ExportNetwork, OutOfRangeFilterLeavesNoEdges) {
    const auto& d = jm_dataset();
    const auto net = export_network(profile(d), compute_quality_matrices(d), EdgeFilter::parse("jm_abs>1.0"));
    EXPECT_TRUE(net.edges.empty());
    EXPECT_EQ(net.nodes.size(), 10u);
    EXPECT_EQ(net.applied_filters.size(), 1u);
}

TEST(ExportNetwork, TopJmAbsEdgeIsMcpClassification) {
    const auto& d = jm_dataset();
    const auto q = compute_quality_matrices(d);
    double best = 0;
    for (std::size_t j = 0; j < 10; ++j)
        for (std::size_t k = j + 1; k < 10; ++k) best = std::max(best, q.get(MetricId::jm_abs).value(j, k));
    const auto net = export_network(profile(d), q, EdgeFilter{{{MetricId::jm_abs, {CompareOp::greater_equal, best}}}});
    ASSERT_EQ(net.edges.size(), 1u);
    EXPECT_EQ(net.nodes[net.edges[0].source].label, "MCP_1");
    EXPECT_EQ(net.nodes[net.edges[0].target].label, "Classification");
}

TEST(ExportNetwork, EdgesCarryBothCmDirections) {
    const auto gen = inject_cm(fixtures::coimbra_like(), fixtures::breast_cancer_cm_spec());
    const auto q = compute_quality_matrices(gen.dataset);
    const auto net = export_network(profile(gen.dataset), q);
    for (const auto& e : net.edges) {
        EXPECT_EQ(e.cm_did_s_given_t, q.conditional->density_difference.value(e.source, e.target));
        EXPECT_EQ(e.cm_did_t_given_s, q.conditional->density_difference.value(e.target, e.source));
        EXPECT_EQ(e.cm_did, std::max(e.cm_did_s_given_t, e.cm_did_t_given_s));
        EXPECT_EQ(e.cm_support_t_given_s, q.conditional->entropy.support(e.target, e.source));
    }
}

TEST(ExportNetwork, UncomputedMetricIsAnError) {
    const auto& d = jm_dataset();
    const auto q = compute_quality_matrices(d, {.conditional = false});
    EXPECT_THROW(export_network(profile(d), q, EdgeFilter::parse("cm_h>0.1")), UncomputedError);
    const auto net = export_network(profile(d), q);
    EXPECT_TRUE(std::isnan(net.edges[0].cm_did));
    std::ostringstream edges;
    write_edges_csv(edges, net);
    std::istringstream lines(edges.str());
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    // CM columns are left empty.
    EXPECT_NE(row.find(",,,,,,,"), std::string::npos);
}

// Exporting with A ∧ B equals exporting with A and keeping the rows that also
// satisfy B.
TEST(ExportNetwork, FiltersCommuteWithRowFiltering) {
    Rng rng(31);
    for (int t = 0; t < 20; ++t) {
        const auto d = fixtures::random_dataset(rng, 10 + rng.below(40), 3 + rng.below(5));
        const auto q = compute_quality_matrices(d);
        const auto p = profile(d);
        const auto both = export_network(p, q, EdgeFilter::parse("jm_dir<0.05,cm_did>0.2"));
        const auto first = export_network(p, q, EdgeFilter::parse("jm_dir<0.05"));
        std::vector<std::pair<std::size_t, std::size_t>> kept;
        for (const auto& e : first.edges)
            if (e.cm_did > 0.2) kept.emplace_back(e.source, e.target);
        ASSERT_EQ(edge_pairs(both), kept);
        const auto swapped = export_network(p, q, EdgeFilter::parse("cm_did>0.2,jm_dir<0.05"));
        ASSERT_EQ(edge_pairs(swapped), kept);
    }
}

TEST(NetworkCsv, HeadersAndFiles) {
    const auto& d = jm_dataset();
    const auto net = export_network(profile(d), compute_quality_matrices(d));
    const auto dir = std::filesystem::temp_directory_path() / "missq_net_test";
    std::filesystem::remove_all(dir);
    write_network(dir, net);
    std::ifstream nodes(dir / "nodes.csv");
    std::ifstream edges(dir / "edges.csv");
    std::string line;
    std::getline(nodes, line);
    EXPECT_EQ(line, kNodesHeader);
    std::getline(nodes, line);
    EXPECT_EQ(line.substr(0, 6), "0,Age,");
    std::getline(edges, line);
    EXPECT_EQ(line, kEdgesHeader);
    std::size_t count = 0;
    while (std::getline(edges, line)) ++count;
    EXPECT_EQ(count, 45u);
    std::filesystem::remove_all(dir);
}

TEST(MatrixCsv, RowCounts) {
    PairwiseQMMatrix sym(MetricId::jm_mag, {"a", "b"});
    sym.set(0, 1, 0.25, 3);
    sym.set(1, 0, 0.25, 3);
    std::ostringstream s1;
    export_matrix_csv(s1, sym);
    EXPECT_EQ(data_rows(s1.str()), 1u);
    EXPECT_EQ(s1.str(), std::string(kMatrixHeader) + "\na,b,jm_mag,0.250000000,3\n");

    Rng rng(3);
    const auto d = fixtures::random_dataset(rng, 30, 3);
    std::ostringstream s2;
    export_matrix_csv(s2, cm_matrices(d).density_difference);
    EXPECT_EQ(data_rows(s2.str()), 6u);
}

TEST(MatrixCsv, ReimportWithinPrecision) {
    Rng rng(12);
    for (int t = 0; t < 20; ++t) {
        const auto d = fixtures::random_dataset(rng, 5 + rng.below(50), 2 + rng.below(5));
        const auto q = compute_quality_matrices(d);
        for (auto metric : {MetricId::jm_mag, MetricId::jm_dir, MetricId::jm_abs, MetricId::cm_did, MetricId::cm_h}) {
            const auto& m = q.get(metric);
            std::stringstream s;
            export_matrix_csv(s, m);
            const auto back = read_matrix_csv(s, metric, m.variables());
            for (std::size_t j = 0; j < m.size(); ++j)
                for (std::size_t k = 0; k < m.size(); ++k) {
                    if (j == k) continue;
                    ASSERT_NEAR(back.value(j, k), m.value(j, k), 1e-9);
                    ASSERT_EQ(back.support(j, k), m.support(j, k));
                }
        }
    }
}

TEST(MatrixCsv, RejectsForeignRows) {
    std::istringstream bad(std::string(kMatrixHeader) + "\na,zz,jm_mag,0.1,1\n");
    EXPECT_THROW(read_matrix_csv(bad, MetricId::jm_mag, {"a", "b"}), ValidationError);
}

TEST(Fixed9, Formatting) {
    EXPECT_EQ(format_fixed9(0.151), "0.151000000");
    EXPECT_EQ(format_fixed9(-1e-12), "0.000000000");
    EXPECT_EQ(format_fixed9(std::nan("")), "");
}

TEST(ProfileCsv, TwoColumns) {
    const IncompleteDataset d("p", {fixtures::numeric_column("a", std::vector<std::optional<double>>{1.0, {}}),
                                    fixtures::numeric_column("b", std::vector<double>{1, 2})});
    std::ostringstream s;
    write_profile_csv(s, profile(d));
    EXPECT_EQ(s.str(), "variable,q_am\na,0.500000000\nb,0.000000000\n");
}

TEST(Json, MatrixUsesNullForNotApplicable) {
    const auto m = jm_matrices(jm_dataset());
    const auto j = to_json(m.directional);
    EXPECT_TRUE(j["values"][0][0].is_null());
    EXPECT_EQ(j["values"][0][1].get<double>(), m.directional.value(0, 1));
    EXPECT_EQ(j["support"][0][1].get<std::uint64_t>(), m.directional.support(0, 1));
    EXPECT_EQ(j["metric"], "jm_dir");
}

TEST(Json, MissigRedBlocksMatchJointMagnitude) {
    const auto gen = inject_cm(fixtures::coimbra_like(), fixtures::breast_cancer_cm_spec());
    const auto& d = gen.dataset;
    const auto j = *d.index_of("HOMA");
    const auto payload = missig_json(d, j);
    ASSERT_EQ(payload["glyphs"].size(), d.variable_count());
    for (std::size_t k = 0; k < d.variable_count(); ++k) {
        const auto& g = payload["glyphs"][k];
        if (k == j) {
            EXPECT_TRUE(g["joint_missing"].is_null());
            continue;
        }
        EXPECT_EQ(g["joint_missing"].get<std::uint64_t>(), joint_missing_count(d, j, k));
        EXPECT_NEAR(g["jm_magnitude"].get<double>() * 116.0, static_cast<double>(joint_missing_count(d, j, k)), 1e-9);
        if (g["support"].get<std::uint64_t>() > 0) {
            double sum = 0;
            for (const auto& p : g["conditioned_histogram"]["probabilities"]) sum += p.get<double>();
            EXPECT_NEAR(sum, 1.0, 1e-12);
        }
    }
}

TEST(Json, MissigOfCompleteVariableHasNoRedComponents) {
    const auto d = fixtures::coimbra_like();
    const auto payload = missig_json(d, 0);
    for (std::size_t k = 1; k < d.variable_count(); ++k) {
        const auto& g = payload["glyphs"][k];
        EXPECT_EQ(g["joint_missing"].get<int>(), 0);
        EXPECT_EQ(g["support"].get<int>(), 0);
        EXPECT_TRUE(g["conditioned_histogram"].is_null());
    }
}

TEST(Json, ItemsCarryExplicitMissingFlag) {
    const IncompleteDataset d("p", {fixtures::numeric_column("a", std::vector<std::optional<double>>{1.5, {}}),
                                    fixtures::label_column("b", {"x", std::nullopt})});
    const auto items = items_json(d);
    EXPECT_EQ(items["items"][0]["cells"][0]["value"].get<double>(), 1.5);
    EXPECT_FALSE(items["items"][0]["cells"][0]["missing"].get<bool>());
    EXPECT_TRUE(items["items"][1]["cells"][0]["value"].is_null());
    EXPECT_TRUE(items["items"][1]["cells"][1]["missing"].get<bool>());
}
