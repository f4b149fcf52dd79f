#pragma once

// JSON forms of the engine's types, shared by the CLI and the HTTP service so
// both serve identical payloads.

#include "missq/conditional.hpp"
#include "missq/dataset.hpp"
#include "missq/export.hpp"
#include "missq/missgen.hpp"
#include "missq/ordering.hpp"
#include "missq/quality.hpp"
#include "missq/univariate.hpp"

#include "json.hpp"

namespace missq {

using Json = nlohmann::json;

/// {name, K, N, total_missing, variables: [{name, kind, missing_count, recorded_count}]}
Json summary_json(const IncompleteDataset& d);
Json to_json(const MissingnessProfile& p);
/// Values and supports as K×K arrays; not-applicable entries are null.
Json to_json(const PairwiseQMMatrix& m);
Json to_json(const BinnedDistribution& b);
Json to_json(const ConditionalProfile& p, const IncompleteDataset& d);
Json to_json(const VariableOrdering& o, const IncompleteDataset& d);
Json to_json(const GroundTruthManifest& m);
/// Same columns as nodes.csv / edges.csv; NaN CM values become null.
Json to_json(const NetworkExport& net);

/// Items for linked views: one row per item, each cell {value, missing}.
/// Missing cells carry value null and missing true.
Json items_json(const IncompleteDataset& d, std::size_t offset = 0, std::size_t limit = SIZE_MAX);

/// Glyph payload for a selected variable: for every variable its amount
/// missing, overall histogram, joint-missing block with the selection and the
/// histogram conditioned on the selection.
Json missig_json(const IncompleteDataset& d, std::size_t selected);

/// Throws ValidationError on malformed documents.
MissingnessSpec spec_from_json(const Json& j);
Json to_json(const MissingnessSpec& s);
IngestConfig ingest_config_from_json(const Json& j, IngestConfig base = {});

}  // namespace missq
