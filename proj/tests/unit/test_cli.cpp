#include "missq/cli.hpp"
#include "missq/errors.hpp"
#include "missq/export.hpp"
#include "missq/json_io.hpp"
#include "support/fixtures.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace missq;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// s goes missing exactly on the six largest t values; u is noise.
IncompleteDataset tail_dependent() {
    Rng rng(3);
    std::vector<double> t(400), u(400);
    for (auto& x : t) x = fixtures::normal(rng);
    for (auto& x : u) x = fixtures::normal(rng);
    auto sorted = t;
    std::sort(sorted.begin(), sorted.end());
    const double cut = sorted[sorted.size() - 6];
    std::vector<std::optional<double>> s(400);
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] < cut) s[i] = fixtures::normal(rng);
    return IncompleteDataset("tail", {fixtures::numeric_column("s", s), fixtures::numeric_column("t", t),
                                      fixtures::numeric_column("u", u)});
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("missq_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        complete_ = dir_ / "complete.csv";
        save_csv(complete_, fixtures::coimbra_like());
        incomplete_ = dir_ / "incomplete.csv";
        save_csv(incomplete_, inject_jm(fixtures::coimbra_like(), fixtures::breast_cancer_jm_spec()).dataset);
        conditional_ = dir_ / "conditional.csv";
        save_csv(conditional_, tail_dependent());
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path dir_, complete_, incomplete_, conditional_;
};

}  // namespace

TEST_F(CliTest, ProfileMatchesModuleOutput) {
    const auto r = run_cli({"profile", incomplete_.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    std::ostringstream expected;
    write_profile_csv(expected, profile(load_csv(incomplete_)));
    EXPECT_EQ(r.out, expected.str());
    EXPECT_EQ(r.out.substr(0, 15), "variable,q_am\nA");
}

TEST_F(CliTest, MatricesMatchModuleOutput) {
    const auto d = load_csv(incomplete_);
    const auto q = compute_quality_matrices(d);
    std::ostringstream jm, cm;
    export_matrices_csv(jm, {&q.get(MetricId::jm_mag), &q.get(MetricId::jm_dir), &q.get(MetricId::jm_abs)});
    export_matrices_csv(cm, {&q.get(MetricId::cm_did), &q.get(MetricId::cm_h)});
    EXPECT_EQ(run_cli({"jm", incomplete_.string()}).out, jm.str());
    EXPECT_EQ(run_cli({"cm", incomplete_.string()}).out, cm.str());

    const auto out = dir_ / "jm_dir.csv";
    ASSERT_EQ(run_cli({"jm", incomplete_.string(), "--metric", "jm_dir", "-o", out.string()}).code, 0);
    std::ostringstream one;
    export_matrix_csv(one, q.get(MetricId::jm_dir));
    EXPECT_EQ(slurp(out), one.str());
    EXPECT_EQ(run_cli({"jm", incomplete_.string(), "--metric", "cm_h"}).code, cli::kUsage);
}

TEST_F(CliTest, OrderAndSelectPrintNames) {
    const auto d = load_csv(incomplete_);
    const auto o = run_cli({"order", incomplete_.string(), "--metric", "jm_abs"});
    ASSERT_EQ(o.code, 0) << o.err;
    const auto expected = order_by_pairwise(compute_quality_matrices(d, {.conditional = false}).get(MetricId::jm_abs));
    std::string names;
    for (auto i : expected.permutation) names += d.variable(i).name() + "\n";
    EXPECT_EQ(o.out, names);

    const auto js = run_cli({"order", incomplete_.string(), "--json"});
    EXPECT_EQ(Json::parse(js.out), to_json(order_by_univariate(profile(d)), d));

    const auto s = run_cli({"select", incomplete_.string(), "--filter", "jm_abs>0.14"});
    EXPECT_EQ(s.out, "MCP_1\nClassification\n");
    const auto top = run_cli({"select", incomplete_.string(), "--metric", "q_am", "--top-n", "2"});
    EXPECT_EQ(std::count(top.out.begin(), top.out.end(), '\n'), 2);
    EXPECT_EQ(run_cli({"select", incomplete_.string(), "--op", "=", "--threshold", "1"}).code, cli::kUsage);
}

TEST_F(CliTest, GenerateIsDeterministic) {
    const auto spec = dir_ / "spec.json";
    Json j = to_json(fixtures::breast_cancer_jm_spec());
    j["source"] = "complete.csv";
    std::ofstream(spec) << j.dump();
    const auto a = dir_ / "a.csv", b = dir_ / "b.csv", m = dir_ / "m.json";
    ASSERT_EQ(run_cli({"generate", "jm", "--spec", spec.string(), "--seed", "7", "-o", a.string()}).code, 0);
    ASSERT_EQ(run_cli({"generate", "jm", complete_.string(), "--spec", spec.string(), "--seed", "7", "-o",
                       b.string(), "--manifest", m.string()})
                  .code,
              0);
    EXPECT_EQ(slurp(a), slurp(b));
    auto spec_struct = fixtures::breast_cancer_jm_spec();
    spec_struct.seed = 7;
    const auto gen = inject(load_csv(complete_), spec_struct);
    EXPECT_EQ(slurp(a), to_csv_string(gen.dataset));
    EXPECT_EQ(Json::parse(slurp(m)), to_json(gen.manifest));

    const auto other = run_cli({"generate", "jm", "--spec", spec.string(), "--seed", "8"});
    EXPECT_NE(other.out, slurp(a));
    EXPECT_EQ(run_cli({"generate", "cm", "--spec", spec.string()}).code, cli::kUsage);
}

TEST_F(CliTest, ExportNetworkAppliesFilter) {
    const auto net_dir = dir_ / "net";
    const auto r =
        run_cli({"export-network", conditional_.string(), "--filter", "jm_dir<0.05,cm_did>0.9", "-o", net_dir.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto d = load_csv(conditional_);
    const auto q = compute_quality_matrices(d);
    const auto filter = EdgeFilter::parse("jm_dir<0.05,cm_did>0.9");
    const auto net = export_network(profile(d), q, filter);
    std::ostringstream nodes, edges;
    write_nodes_csv(nodes, net);
    write_edges_csv(edges, net);
    EXPECT_EQ(slurp(net_dir / "nodes.csv"), nodes.str());
    EXPECT_EQ(slurp(net_dir / "edges.csv"), edges.str());
    for (const auto& e : net.edges) {
        EXPECT_LT(e.jm_dir, 0.05);
        EXPECT_GT(e.cm_did, 0.9);
    }
    // Every satisfying pair is present.
    std::size_t expected = 0;
    for (std::size_t s = 0; s < d.variable_count(); ++s)
        for (std::size_t t = s + 1; t < d.variable_count(); ++t)
            expected += q.get(MetricId::jm_dir).pair_value(s, t) < 0.05 &&
                        q.get(MetricId::cm_did).pair_value(s, t, q.aggregate()) > 0.9;
    EXPECT_EQ(net.edges.size(), expected);
    ASSERT_EQ(expected, 1u);
    EXPECT_EQ(net.edges[0].source, 0u);
    EXPECT_EQ(net.edges[0].target, 1u);
}

TEST_F(CliTest, ExitCodes) {
    EXPECT_EQ(run_cli({}).code, cli::kUsage);
    const auto unknown = run_cli({"profile", incomplete_.string(), "--bogus"});
    EXPECT_EQ(unknown.code, cli::kUsage);
    EXPECT_NE(unknown.err.find("Usage:"), std::string::npos);
    EXPECT_EQ(run_cli({"profile", (dir_ / "none.csv").string()}).code, cli::kIo);
    std::ofstream(dir_ / "ragged.csv") << "a,b\n1,2\n3\n";
    const auto ragged = run_cli({"profile", (dir_ / "ragged.csv").string()});
    EXPECT_EQ(ragged.code, cli::kIngest);
    EXPECT_NE(ragged.err.find("row 3"), std::string::npos);

    std::ofstream(dir_ / "bad.json")
        << R"({"jm_pairs": [{"j": "Age", "k": "BMI", "p_j": 0.6, "p_k": 0.6, "pattern": "below", "p_jk": 0.1}]})";
    const auto infeasible = run_cli({"generate", "jm", complete_.string(), "--spec", (dir_ / "bad.json").string()});
    EXPECT_EQ(infeasible.code, cli::kFeasibility);
    EXPECT_NE(infeasible.err.find("frechet_lower"), std::string::npos);
    EXPECT_EQ(run_cli({"profile", incomplete_.string(), "-o", (dir_ / "no/such/dir/x.csv").string()}).code,
              cli::kIo);
    EXPECT_EQ(run_cli({"export-network", incomplete_.string(), "--filter", "jm_dir", "-o", dir_.string()}).code,
              cli::kUsage);
}

TEST_F(CliTest, MissingTokensFromEnvironment) {
    std::ofstream(dir_ / "t.csv") << "a,b\n1,?\n2,3\n";
    EXPECT_EQ(run_cli({"profile", (dir_ / "t.csv").string()}).out, "variable,q_am\na,0.000000000\nb,0.000000000\n");
    ::setenv("MISSQ_MISSING_TOKENS", "?", 1);
    EXPECT_EQ(run_cli({"profile", (dir_ / "t.csv").string()}).out, "variable,q_am\na,0.000000000\nb,0.500000000\n");
    // The flag wins over the environment.
    EXPECT_EQ(run_cli({"profile", (dir_ / "t.csv").string(), "--missing-tokens", "NaN"}).out,
              "variable,q_am\na,0.000000000\nb,0.000000000\n");
    ::unsetenv("MISSQ_MISSING_TOKENS");
}

TEST(CliDocs, HelpDocumentsEveryFlag) {
    const std::vector<std::string> ingest = {"--delimiter", "--missing-tokens", "--no-header", "--categorical",
                                             "--numerical"};
    const std::map<std::string, std::vector<std::string>> flags = {
        {"profile", {"input", "--output"}},
        {"jm", {"input", "--output", "--metric"}},
        {"cm", {"input", "--output", "--metric"}},
        {"order", {"input", "--output", "--metric", "--ascending", "--aggregate", "--json"}},
        {"select", {"input", "--output", "--metric", "--op", "--threshold", "--top-n", "--filter", "--aggregate"}},
        {"generate", {"mode", "input", "--spec", "--seed", "--output", "--manifest"}},
        {"export-network", {"input", "--output", "--filter", "--aggregate"}},
        {"serve", {"--host", "--port", "--static", "--load"}},
    };
    const auto top = run_cli({"--help"});
    ASSERT_EQ(top.code, 0);
    for (const auto& [sub, names] : flags) {
        EXPECT_NE(top.out.find("  " + sub + " "), std::string::npos) << sub;
        const auto help = run_cli({sub, "--help"});
        ASSERT_EQ(help.code, 0) << sub;
        auto all = names;
        all.insert(all.end(), ingest.begin(), ingest.end());
        for (const auto& flag : all) EXPECT_NE(help.out.find(flag), std::string::npos) << sub << " " << flag;
        // Every option line carries a description after the name column.
        std::istringstream lines(help.out);
        std::string line;
        while (std::getline(lines, line)) {
            if (line.rfind("  -", 0) != 0 && line.rfind("  input", 0) != 0 && line.rfind("  mode", 0) != 0) continue;
            const auto gap = line.find("  ", 2);
            ASSERT_NE(gap, std::string::npos) << line;
            EXPECT_NE(line.find_first_not_of(' ', gap), std::string::npos) << sub << ": " << line;
        }
    }
}
