#pragma once

// Node/edge tables for graph tools and long-form matrix files. Exports carry
// raw metric values; sizes, widths and colours are left to the consumer.

#include "missq/filter.hpp"
#include "missq/quality.hpp"
#include "missq/univariate.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace missq {

struct NetworkNode {
    std::size_t id = 0;
    std::string label;
    double q_am = 0.0;
    std::size_t missing_count = 0;
};

/// One unordered pair. CM values are NaN when CM was not computed;
/// `cm_did`/`cm_h` hold the aggregate of both directions.
struct NetworkEdge {
    std::size_t source = 0;
    std::size_t target = 0;
    double jm_mag = 0.0;
    double jm_dir = 0.0;
    double jm_abs = 0.0;
    std::uint64_t jm_support = 0;
    double cm_did = 0.0;
    double cm_h = 0.0;
    double cm_did_s_given_t = 0.0;
    double cm_did_t_given_s = 0.0;
    double cm_h_s_given_t = 0.0;
    double cm_h_t_given_s = 0.0;
    std::uint64_t cm_support_s_given_t = 0;
    std::uint64_t cm_support_t_given_s = 0;
};

struct NetworkExport {
    std::vector<NetworkNode> nodes;
    std::vector<NetworkEdge> edges;
    std::vector<Predicate> applied_filters;
};

/// One node per variable and one edge per unordered pair accepted by every
/// filter, ordered by (source, target). Throws UncomputedError when a filter
/// names a metric missing from `matrices`.
NetworkExport export_network(const MissingnessProfile& profile, const QualityMatrices& matrices,
                             const EdgeFilter& filter = {});

inline constexpr const char* kNodesHeader = "id,label,q_am,missing_count";
inline constexpr const char* kEdgesHeader =
    "source,target,source_label,target_label,jm_mag,jm_dir,jm_abs,jm_support,cm_did,cm_h,"
    "cm_did_s_given_t,cm_did_t_given_s,cm_h_s_given_t,cm_h_t_given_s,cm_support_s_given_t,cm_support_t_given_s";
inline constexpr const char* kMatrixHeader = "source,target,metric,value,support";

void write_nodes_csv(std::ostream& out, const NetworkExport& net);
void write_edges_csv(std::ostream& out, const NetworkExport& net);
/// Writes nodes.csv and edges.csv into `directory`, creating it if needed.
void write_network(const std::filesystem::path& directory, const NetworkExport& net);

/// Long form: one row per unordered pair for symmetric metrics, per ordered
/// pair for directional ones; diagonal omitted. Values fixed-point, 9 decimals.
void export_matrix_csv(std::ostream& out, const PairwiseQMMatrix& m);
/// Several matrices in one table (rows grouped by matrix).
void export_matrices_csv(std::ostream& out, const std::vector<const PairwiseQMMatrix*>& matrices);
/// Inverse of export_matrix_csv for one metric over the given variables.
PairwiseQMMatrix read_matrix_csv(std::istream& in, MetricId metric, const std::vector<std::string>& variables);

/// variable,q_am with 9-decimal values.
void write_profile_csv(std::ostream& out, const MissingnessProfile& p);

/// Fixed-point with 9 decimals, empty for NaN.
std::string format_fixed9(double v);

}  // namespace missq
