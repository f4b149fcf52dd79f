#include "missq/export.hpp"

#include "missq/dataset.hpp"
#include "missq/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

namespace missq {

std::string format_fixed9(double v) {
    if (std::isnan(v)) return {};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    // "-0.000000000" would otherwise survive round-trips as negative zero text.
    if (std::string_view(buf) == "-0.000000000") return "0.000000000";
    return buf;
}

NetworkExport export_network(const MissingnessProfile& profile, const QualityMatrices& matrices,
                             const EdgeFilter& filter) {
    if (!matrices.joint) throw UncomputedError("network export needs the joint-missingness matrices");
    if (matrices.size() != profile.entries.size())
        throw ValidationError("profile and matrices describe different datasets");
    filter.check_available(matrices);

    NetworkExport net;
    net.applied_filters = filter.predicates;
    for (std::size_t j = 0; j < profile.entries.size(); ++j) {
        const auto& e = profile.entries[j];
        net.nodes.push_back({j, e.variable, e.q_am, e.missing_count});
    }
    const auto& jm = *matrices.joint;
    const ConditionalMatrices* cm = matrices.conditional ? &*matrices.conditional : nullptr;
    for (auto [s, t] : filter_edges(matrices, filter)) {
        NetworkEdge e;
        e.source = s;
        e.target = t;
        e.jm_mag = jm.magnitude.value(s, t);
        e.jm_dir = jm.directional.value(s, t);
        e.jm_abs = jm.absolute.value(s, t);
        e.jm_support = jm.magnitude.support(s, t);
        if (cm != nullptr) {
            e.cm_did = cm->density_difference.pair_value(s, t, cm->aggregate);
            e.cm_h = cm->entropy.pair_value(s, t, cm->aggregate);
            e.cm_did_s_given_t = cm->density_difference.value(s, t);
            e.cm_did_t_given_s = cm->density_difference.value(t, s);
            e.cm_h_s_given_t = cm->entropy.value(s, t);
            e.cm_h_t_given_s = cm->entropy.value(t, s);
            e.cm_support_s_given_t = cm->density_difference.support(s, t);
            e.cm_support_t_given_s = cm->density_difference.support(t, s);
        } else {
            e.cm_did = e.cm_h = kNotApplicable;
            e.cm_did_s_given_t = e.cm_did_t_given_s = kNotApplicable;
            e.cm_h_s_given_t = e.cm_h_t_given_s = kNotApplicable;
        }
        net.edges.push_back(e);
    }
    return net;
}

void write_nodes_csv(std::ostream& out, const NetworkExport& net) {
    out << kNodesHeader << '\n';
    for (const auto& n : net.nodes)
        out << n.id << ',' << csv_field(n.label) << ',' << format_fixed9(n.q_am) << ',' << n.missing_count << '\n';
}

void write_edges_csv(std::ostream& out, const NetworkExport& net) {
    out << kEdgesHeader << '\n';
    for (const auto& e : net.edges) {
        const bool has_cm = !std::isnan(e.cm_did);
        out << e.source << ',' << e.target << ',' << csv_field(net.nodes[e.source].label) << ','
            << csv_field(net.nodes[e.target].label) << ',' << format_fixed9(e.jm_mag) << ','
            << format_fixed9(e.jm_dir) << ',' << format_fixed9(e.jm_abs) << ',' << e.jm_support << ','
            << format_fixed9(e.cm_did) << ',' << format_fixed9(e.cm_h) << ',' << format_fixed9(e.cm_did_s_given_t)
            << ',' << format_fixed9(e.cm_did_t_given_s) << ',' << format_fixed9(e.cm_h_s_given_t) << ','
            << format_fixed9(e.cm_h_t_given_s) << ',';
        if (has_cm) out << e.cm_support_s_given_t << ',' << e.cm_support_t_given_s;
        else out << ',';
        out << '\n';
    }
}

void write_network(const std::filesystem::path& directory, const NetworkExport& net) {
    std::error_code ec;
    std::filesystem::create_directories(directory, ec);
    if (ec) throw IoError("cannot create directory '" + directory.string() + "': " + ec.message());
    for (const auto& [file, writer] :
         {std::pair{"nodes.csv", &write_nodes_csv}, std::pair{"edges.csv", &write_edges_csv}}) {
        const auto path = directory / file;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
        writer(out, net);
        out.flush();
        if (!out) throw IoError("failed writing '" + path.string() + "'");
    }
}

namespace {

void write_matrix_rows(std::ostream& out, const PairwiseQMMatrix& m) {
    const auto metric = std::string(to_string(m.metric()));
    for (std::size_t j = 0; j < m.size(); ++j) {
        for (std::size_t k = 0; k < m.size(); ++k) {
            if (j == k || (m.symmetric() && k < j)) continue;
            out << csv_field(m.variables()[j]) << ',' << csv_field(m.variables()[k]) << ',' << metric << ','
                << format_fixed9(m.value(j, k)) << ',' << m.support(j, k) << '\n';
        }
    }
}

}  // namespace

void export_matrix_csv(std::ostream& out, const PairwiseQMMatrix& m) {
    out << kMatrixHeader << '\n';
    write_matrix_rows(out, m);
}

void export_matrices_csv(std::ostream& out, const std::vector<const PairwiseQMMatrix*>& matrices) {
    out << kMatrixHeader << '\n';
    for (const auto* m : matrices) write_matrix_rows(out, *m);
}

PairwiseQMMatrix read_matrix_csv(std::istream& in, MetricId metric, const std::vector<std::string>& variables) {
    IngestConfig cfg;
    cfg.missing_tokens = {"\x01"};
    cfg.kind_overrides = {{"source", VariableKind::categorical},
                          {"target", VariableKind::categorical},
                          {"metric", VariableKind::categorical},
                          {"value", VariableKind::numerical},
                          {"support", VariableKind::numerical}};
    const IncompleteDataset rows = read_csv(in, cfg, "matrix");
    PairwiseQMMatrix m(metric, variables);
    const auto& src = rows.variable(*rows.index_of("source"));
    const auto& dst = rows.variable(*rows.index_of("target"));
    const auto& met = rows.variable(*rows.index_of("metric"));
    const auto& val = rows.variable(*rows.index_of("value"));
    const auto& sup = rows.variable(*rows.index_of("support"));
    auto index_of = [&](const std::string& name) {
        for (std::size_t j = 0; j < variables.size(); ++j)
            if (variables[j] == name) return j;
        throw ValidationError("matrix row references unknown variable '" + name + "'");
    };
    for (std::size_t i = 0; i < rows.item_count(); ++i) {
        if (*met.label(i) != to_string(metric)) continue;
        const auto j = index_of(*src.label(i));
        const auto k = index_of(*dst.label(i));
        const double v = *val.number(i);
        const auto s = static_cast<std::uint64_t>(*sup.number(i));
        m.set(j, k, v, s);
        if (m.symmetric()) m.set(k, j, v, s);
    }
    return m;
}

void write_profile_csv(std::ostream& out, const MissingnessProfile& p) {
    out << "variable,q_am\n";
    for (const auto& e : p.entries) out << csv_field(e.variable) << ',' << format_fixed9(e.q_am) << '\n';
}

}  // namespace missq
