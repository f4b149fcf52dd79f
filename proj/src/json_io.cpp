#include "missq/json_io.hpp"

#include "missq/errors.hpp"
#include "missq/joint.hpp"

#include <cmath>

namespace missq {

namespace {

Json number_or_null(double v) { return std::isnan(v) ? Json(nullptr) : Json(v); }

Json bound_json(const IntervalBound& b) {
    return std::visit([](const auto& x) { return Json(x); }, b);
}

}  // namespace

Json summary_json(const IncompleteDataset& d) {
    Json vars = Json::array();
    for (const auto& v : d.variables()) {
        vars.push_back({{"name", v.name()},
                        {"kind", std::string(to_string(v.kind()))},
                        {"missing_count", v.missing_count()},
                        {"recorded_count", v.recorded_count()}});
    }
    return {{"name", d.name()},
            {"K", d.variable_count()},
            {"N", d.item_count()},
            {"total_missing", d.total_missing()},
            {"variables", std::move(vars)}};
}

Json to_json(const MissingnessProfile& p) {
    Json entries = Json::array();
    for (const auto& e : p.entries) {
        entries.push_back({{"variable", e.variable},
                           {"q_am", e.q_am},
                           {"missing_count", e.missing_count},
                           {"recorded_count", e.recorded_count}});
    }
    return {{"N", p.item_count}, {"entries", std::move(entries)}, {"total_missing_fraction", p.total_missing_fraction}};
}

Json to_json(const PairwiseQMMatrix& m) {
    Json values = Json::array();
    Json support = Json::array();
    for (std::size_t j = 0; j < m.size(); ++j) {
        Json vrow = Json::array();
        Json srow = Json::array();
        for (std::size_t k = 0; k < m.size(); ++k) {
            vrow.push_back(number_or_null(m.value(j, k)));
            srow.push_back(m.support(j, k));
        }
        values.push_back(std::move(vrow));
        support.push_back(std::move(srow));
    }
    return {{"metric", std::string(to_string(m.metric()))},
            {"symmetric", m.symmetric()},
            {"variables", m.variables()},
            {"values", std::move(values)},
            {"support", std::move(support)}};
}

Json to_json(const BinnedDistribution& b) {
    Json j = {{"variable", b.variable},
              {"kind", std::string(to_string(b.kind))},
              {"bin_count", b.bin_count},
              {"counts", b.counts},
              {"probabilities", b.probabilities},
              {"total", b.total()}};
    if (b.kind == VariableKind::numerical) j["edges"] = b.edges;
    else j["categories"] = b.categories;
    return j;
}

Json to_json(const ConditionalProfile& p, const IncompleteDataset& d) {
    return {{"target", d.variable(p.target).name()},
            {"condition", d.variable(p.condition).name()},
            {"overall", p.overall ? to_json(*p.overall) : Json(nullptr)},
            {"conditioned", p.conditioned ? to_json(*p.conditioned) : Json(nullptr)},
            {"support", p.support},
            {"joint_missing", p.joint_missing},
            {"q_cm_did", p.q_cm_did},
            {"q_cm_h", p.q_cm_h}};
}

Json to_json(const VariableOrdering& o, const IncompleteDataset& d) {
    Json names = Json::array();
    for (auto j : o.permutation) names.push_back(d.variable(j).name());
    return {{"metric", std::string(to_string(o.metric))},
            {"permutation", o.permutation},
            {"variables", std::move(names)},
            {"anchor_pair", {o.anchor_pair.first, o.anchor_pair.second}}};
}

Json to_json(const NetworkExport& net) {
    Json nodes = Json::array();
    for (const auto& n : net.nodes)
        nodes.push_back({{"id", n.id}, {"label", n.label}, {"q_am", n.q_am}, {"missing_count", n.missing_count}});
    Json edges = Json::array();
    for (const auto& e : net.edges) {
        const bool has_cm = !std::isnan(e.cm_did);
        edges.push_back({{"source", e.source},
                         {"target", e.target},
                         {"jm_mag", e.jm_mag},
                         {"jm_dir", e.jm_dir},
                         {"jm_abs", e.jm_abs},
                         {"jm_support", e.jm_support},
                         {"cm_did", number_or_null(e.cm_did)},
                         {"cm_h", number_or_null(e.cm_h)},
                         {"cm_did_s_given_t", number_or_null(e.cm_did_s_given_t)},
                         {"cm_did_t_given_s", number_or_null(e.cm_did_t_given_s)},
                         {"cm_h_s_given_t", number_or_null(e.cm_h_s_given_t)},
                         {"cm_h_t_given_s", number_or_null(e.cm_h_t_given_s)},
                         {"cm_support_s_given_t", has_cm ? Json(e.cm_support_s_given_t) : Json(nullptr)},
                         {"cm_support_t_given_s", has_cm ? Json(e.cm_support_t_given_s) : Json(nullptr)}});
    }
    Json filters = Json::array();
    for (const auto& p : net.applied_filters) filters.push_back(p.to_string());
    return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}, {"applied_filters", std::move(filters)}};
}

Json to_json(const GroundTruthManifest& m) {
    Json counts = Json::array();
    for (const auto& [name, c] : m.missing_counts) counts.push_back({{"variable", name}, {"missing", c}});
    Json am = Json::array();
    for (const auto& r : m.am) am.push_back({{"variable", r.variable}, {"target", r.target}, {"missing", r.missing}});
    Json jm = Json::array();
    for (const auto& r : m.jm) {
        jm.push_back({{"j", r.j},
                      {"k", r.k},
                      {"pattern", std::string(to_string(r.pattern))},
                      {"target", {{"p_j", r.target_p_j}, {"p_k", r.target_p_k}, {"p_jk", r.target_p_jk}}},
                      {"counts", {{"missing_j", r.missing_j}, {"missing_k", r.missing_k}, {"joint", r.joint}}},
                      {"residuals", {{"p_j", r.residual_p_j}, {"p_k", r.residual_p_k}, {"p_jk", r.residual_p_jk}}}});
    }
    Json cm = Json::array();
    for (const auto& r : m.cm) {
        cm.push_back({{"j", r.j},
                      {"k", r.k},
                      {"range_type", std::string(to_string(r.range_type))},
                      {"strength", r.strength},
                      {"am_j", r.am_j},
                      {"interval", {bound_json(r.interval_lo), bound_json(r.interval_hi)}},
                      {"inside_items", r.inside_items},
                      {"counts", {{"missing_j", r.missing_j}, {"in_range", r.in_range}, {"out_of_range", r.out_of_range}}}});
    }
    return {{"seed", m.seed},
            {"mode", std::string(to_string(m.mode))},
            {"source", m.source},
            {"N", m.item_count},
            {"missing_counts", std::move(counts)},
            {"am", std::move(am)},
            {"jm", std::move(jm)},
            {"cm", std::move(cm)}};
}

Json items_json(const IncompleteDataset& d, std::size_t offset, std::size_t limit) {
    Json rows = Json::array();
    const std::size_t end = offset + std::min(limit, d.item_count() - std::min(offset, d.item_count()));
    for (std::size_t i = offset; i < end; ++i) {
        Json cells = Json::array();
        for (const auto& v : d.variables()) {
            if (v.is_missing(i)) {
                cells.push_back({{"value", nullptr}, {"missing", true}});
            } else if (v.kind() == VariableKind::numerical) {
                cells.push_back({{"value", v.numbers()[i]}, {"missing", false}});
            } else {
                cells.push_back({{"value", v.categories()[v.codes()[i]]}, {"missing", false}});
            }
        }
        rows.push_back({{"item", i}, {"cells", std::move(cells)}});
    }
    Json names = Json::array();
    for (const auto& v : d.variables()) names.push_back(v.name());
    return {{"N", d.item_count()}, {"offset", offset}, {"variables", std::move(names)}, {"items", std::move(rows)}};
}

Json missig_json(const IncompleteDataset& d, std::size_t selected) {
    const auto& sel = d.variable(selected);
    const BinningCache cache(d);
    Json glyphs = Json::array();
    const std::size_t n = d.item_count();
    for (std::size_t k = 0; k < d.variable_count(); ++k) {
        const auto& v = d.variable(k);
        const VariableBinning* binning = cache.get(k);
        Json g = {{"variable", v.name()},
                  {"selected", k == selected},
                  {"q_am", n ? static_cast<double>(v.missing_count()) / static_cast<double>(n) : 0.0},
                  {"missing_count", v.missing_count()},
                  {"histogram", binning ? to_json(binning->overall) : Json(nullptr)}};
        if (k == selected) {
            g["joint_missing"] = nullptr;
            g["jm_magnitude"] = nullptr;
            g["conditioned_histogram"] = nullptr;
            g["support"] = nullptr;
            g["q_cm_did"] = nullptr;
            g["q_cm_h"] = nullptr;
        } else {
            const ConditionalProfile p = conditional_profile(d, cache, selected, k);
            g["joint_missing"] = p.joint_missing;
            g["jm_magnitude"] = n ? jm_magnitude_from_counts(p.joint_missing, n) : 0.0;
            g["conditioned_histogram"] =
                (p.conditioned && p.support > 0) ? to_json(*p.conditioned) : Json(nullptr);
            g["support"] = p.support;
            g["q_cm_did"] = p.q_cm_did;
            g["q_cm_h"] = p.q_cm_h;
        }
        glyphs.push_back(std::move(g));
    }
    return {{"selected", sel.name()},
            {"selected_index", selected},
            {"N", n},
            {"selected_missing_count", sel.missing_count()},
            {"glyphs", std::move(glyphs)}};
}

// ---------------------------------------------------------------------------
// Spec parsing

namespace {

template <class T>
T get_required(const Json& j, const char* key, const char* where) {
    if (!j.contains(key)) throw ValidationError(std::string(where) + ": missing field '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string(where) + ": field '" + key + "' has the wrong type");
    }
}

std::string variable_ref(const Json& j, const char* key, const char* where) {
    if (!j.contains(key)) throw ValidationError(std::string(where) + ": missing field '" + key + "'");
    const Json& v = j.at(key);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0))
        return std::to_string(v.get<unsigned long long>());
    throw ValidationError(std::string(where) + ": field '" + key + "' must be a variable name or index");
}

double strength_value(const Json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "low" || s == "Low-CM") return kLowCm;
        if (s == "medium" || s == "Medium-CM") return kMediumCm;
        if (s == "high" || s == "High-CM") return kHighCm;
    }
    throw ValidationError("cm pair: strength must be a fraction or one of low, medium, high");
}

}  // namespace

MissingnessSpec spec_from_json(const Json& j) {
    if (!j.is_object()) throw ValidationError("generator spec must be a JSON object");
    MissingnessSpec s;
    if (j.contains("seed")) {
        const Json& seed = j.at("seed");
        if (!seed.is_number_integer()) throw ValidationError("spec: seed must be an integer");
        s.seed = seed.is_number_unsigned() ? seed.get<std::uint64_t>()
                                           : static_cast<std::uint64_t>(seed.get<std::int64_t>());
    }
    s.mode = parse_gen_mode(get_required<std::string>(j, "mode", "spec"));
    if (j.contains("am")) {
        const Json& am = j.at("am");
        if (!am.is_object()) throw ValidationError("spec: 'am' must be an object");
        if (am.contains("targets")) {
            if (!am.at("targets").is_object()) throw ValidationError("spec: am.targets must map variable to fraction");
            for (const auto& [name, frac] : am.at("targets").items()) {
                if (!frac.is_number()) throw ValidationError("spec: am target for '" + name + "' must be a number");
                s.am_targets[name] = frac.get<double>();
            }
        }
        if (am.contains("range")) {
            const Json& r = am.at("range");
            if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number())
                throw ValidationError("spec: am.range must be [lo, hi]");
            s.am_range_lo = r[0].get<double>();
            s.am_range_hi = r[1].get<double>();
        }
    }
    if (j.contains("jm_pairs")) {
        if (!j.at("jm_pairs").is_array()) throw ValidationError("spec: jm_pairs must be an array");
        for (const auto& p : j.at("jm_pairs")) {
            JmPairSpec jp;
            jp.j = variable_ref(p, "j", "jm pair");
            jp.k = variable_ref(p, "k", "jm pair");
            jp.p_j = get_required<double>(p, "p_j", "jm pair");
            jp.p_k = get_required<double>(p, "p_k", "jm pair");
            jp.pattern = parse_jm_pattern(get_required<std::string>(p, "pattern", "jm pair"));
            if (p.contains("p_jk") && !p.at("p_jk").is_null()) jp.p_jk = get_required<double>(p, "p_jk", "jm pair");
            s.jm_pairs.push_back(std::move(jp));
        }
    }
    if (j.contains("cm_pairs")) {
        if (!j.at("cm_pairs").is_array()) throw ValidationError("spec: cm_pairs must be an array");
        for (const auto& p : j.at("cm_pairs")) {
            CmPairSpec cp;
            cp.j = variable_ref(p, "j", "cm pair");
            cp.k = variable_ref(p, "k", "cm pair");
            cp.am_j = get_required<double>(p, "am_j", "cm pair");
            cp.range_type = parse_range_type(get_required<std::string>(p, "range_type", "cm pair"));
            if (!p.contains("strength")) throw ValidationError("cm pair: missing field 'strength'");
            cp.strength = strength_value(p.at("strength"));
            s.cm_pairs.push_back(std::move(cp));
        }
    }
    return s;
}

Json to_json(const MissingnessSpec& s) {
    Json targets = Json::object();
    for (const auto& [name, f] : s.am_targets) targets[name] = f;
    Json jm = Json::array();
    for (const auto& p : s.jm_pairs) {
        Json e = {{"j", p.j}, {"k", p.k}, {"p_j", p.p_j}, {"p_k", p.p_k}, {"pattern", std::string(to_string(p.pattern))}};
        if (p.p_jk) e["p_jk"] = *p.p_jk;
        jm.push_back(std::move(e));
    }
    Json cm = Json::array();
    for (const auto& p : s.cm_pairs) {
        cm.push_back({{"j", p.j},
                      {"k", p.k},
                      {"am_j", p.am_j},
                      {"range_type", std::string(to_string(p.range_type))},
                      {"strength", p.strength}});
    }
    return {{"seed", s.seed},
            {"mode", std::string(to_string(s.mode))},
            {"am", {{"targets", std::move(targets)}, {"range", {s.am_range_lo, s.am_range_hi}}}},
            {"jm_pairs", std::move(jm)},
            {"cm_pairs", std::move(cm)}};
}

IngestConfig ingest_config_from_json(const Json& j, IngestConfig base) {
    if (j.is_null()) return base;
    if (!j.is_object()) throw ValidationError("ingest config must be a JSON object");
    if (j.contains("missing_tokens")) {
        const Json& t = j.at("missing_tokens");
        if (!t.is_array()) throw ValidationError("ingest config: missing_tokens must be an array of strings");
        base.missing_tokens.clear();
        for (const auto& x : t) {
            if (!x.is_string()) throw ValidationError("ingest config: missing_tokens must be strings");
            base.missing_tokens.insert(x.get<std::string>());
        }
    }
    if (j.contains("delimiter")) {
        const Json& dl = j.at("delimiter");
        if (!dl.is_string() || dl.get<std::string>().size() != 1)
            throw ValidationError("ingest config: delimiter must be a single character");
        base.delimiter = dl.get<std::string>()[0];
    }
    if (j.contains("header")) {
        if (!j.at("header").is_boolean()) throw ValidationError("ingest config: header must be true or false");
        base.header = j.at("header").get<bool>();
    }
    if (j.contains("kind_overrides")) {
        const Json& ko = j.at("kind_overrides");
        if (!ko.is_object()) throw ValidationError("ingest config: kind_overrides must be an object");
        for (const auto& [name, kind] : ko.items()) {
            const auto k = kind.is_string() ? kind.get<std::string>() : std::string{};
            if (k == "numerical") base.kind_overrides[name] = VariableKind::numerical;
            else if (k == "categorical") base.kind_overrides[name] = VariableKind::categorical;
            else throw ValidationError("ingest config: kind for '" + name + "' must be numerical or categorical");
        }
    }
    base.validate();
    return base;
}

}  // namespace missq
