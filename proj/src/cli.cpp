#include "missq/cli.hpp"

#include "missq/errors.hpp"
#include "missq/export.hpp"
#include "missq/json_io.hpp"
#include "missq/ordering.hpp"
#include "missq/quality.hpp"
#include "missq/service.hpp"

#include "CLI11.hpp"

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace missq::cli {

namespace {

struct IngestFlags {
    std::string delimiter = ",";
    std::optional<std::string> missing_tokens;
    bool no_header = false;
    std::vector<std::string> categorical;
    std::vector<std::string> numerical;
};

void add_ingest_flags(CLI::App* cmd, IngestFlags& f) {
    cmd->add_option("--delimiter", f.delimiter, "Field delimiter, one character or 'tab'")->capture_default_str();
    cmd->add_option("--missing-tokens", f.missing_tokens,
                    "'|'-separated tokens read as missing (default NaN|NA|N/A|null plus empty fields; "
                    "env MISSQ_MISSING_TOKENS)");
    cmd->add_flag("--no-header", f.no_header, "First row is data; columns are named V1..VK");
    cmd->add_option("--categorical", f.categorical, "Columns forced categorical")->delimiter(',');
    cmd->add_option("--numerical", f.numerical, "Columns forced numerical")->delimiter(',');
}

std::set<std::string> split_tokens(const std::string& s) {
    std::set<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto bar = s.find('|', start);
        out.insert(s.substr(start, bar == std::string::npos ? std::string::npos : bar - start));
        if (bar == std::string::npos) break;
        start = bar + 1;
    }
    return out;
}

IngestConfig ingest_config(const IngestFlags& f) {
    IngestConfig c;
    if (f.delimiter == "tab" || f.delimiter == "\\t") c.delimiter = '\t';
    else if (f.delimiter.size() == 1) c.delimiter = f.delimiter[0];
    else throw ValidationError("--delimiter must be a single character or 'tab'");
    if (f.missing_tokens) {
        c.missing_tokens = split_tokens(*f.missing_tokens);
    } else if (const char* env = std::getenv("MISSQ_MISSING_TOKENS"); env && *env) {
        c.missing_tokens = split_tokens(env);
    }
    c.header = !f.no_header;
    for (const auto& name : f.categorical) c.kind_overrides[name] = VariableKind::categorical;
    for (const auto& name : f.numerical) {
        if (c.kind_overrides.count(name)) throw ValidationError("column '" + name + "' given both kinds");
        c.kind_overrides[name] = VariableKind::numerical;
    }
    c.validate();
    return c;
}

// Writes to -o when given, otherwise to stdout.
template <class F>
void emit(const std::string& path, std::ostream& out, F&& write) {
    if (path.empty() || path == "-") {
        write(out);
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    write(f);
    f.close();
    if (!f) throw IoError("failed writing '" + path + "'");
}

Json read_json_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open '" + p.string() + "'");
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ValidationError(p.string() + ": " + e.what());
    }
}

void print_names(std::ostream& out, const IncompleteDataset& d, const std::vector<std::size_t>& idx) {
    for (auto i : idx) out << d.variable(i).name() << '\n';
}

std::optional<Comparison> comparison_from(const std::string& op, const std::optional<double>& threshold) {
    if (!threshold) return std::nullopt;
    if (!std::isfinite(*threshold)) throw ValidationError("--threshold must be finite");
    return Comparison{parse_compare_op(op), *threshold};
}

int code_for(const std::exception& e) {
    if (dynamic_cast<const IngestError*>(&e)) return kIngest;
    if (dynamic_cast<const FeasibilityError*>(&e)) return kFeasibility;
    if (dynamic_cast<const IoError*>(&e)) return kIo;
    if (dynamic_cast<const ValidationError*>(&e)) return kUsage;
    return kFailure;
}

service::Server* g_server = nullptr;

extern "C" void on_signal(int) {
    if (g_server) g_server->stop();
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Missingness quality metrics: profiles, joint and conditional matrices, orderings, "
                 "synthetic missingness and network export.",
                 "missq"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    std::string input, output;
    IngestFlags ingest;

    auto* profile_cmd = app.add_subcommand("profile", "Amount missing (q_am) per variable as CSV");
    profile_cmd->add_option("input", input, "CSV file")->required();
    profile_cmd->add_option("-o,--output", output, "Output file (default stdout)");
    add_ingest_flags(profile_cmd, ingest);

    std::vector<std::string> metrics;
    auto* jm_cmd = app.add_subcommand("jm", "Joint missingness matrices as long-form CSV");
    jm_cmd->add_option("input", input, "CSV file")->required();
    jm_cmd->add_option("-o,--output", output, "Output file (default stdout)");
    jm_cmd->add_option("--metric", metrics, "Subset of jm_mag,jm_dir,jm_abs (default all)")->delimiter(',');
    add_ingest_flags(jm_cmd, ingest);

    auto* cm_cmd = app.add_subcommand("cm", "Conditional missingness matrices (both directions) as long-form CSV");
    cm_cmd->add_option("input", input, "CSV file")->required();
    cm_cmd->add_option("-o,--output", output, "Output file (default stdout)");
    cm_cmd->add_option("--metric", metrics, "Subset of cm_did,cm_h (default both)")->delimiter(',');
    add_ingest_flags(cm_cmd, ingest);

    std::string metric_name = "q_am", aggregate_name = "max";
    bool ascending = false, as_json = false;
    auto* order_cmd = app.add_subcommand("order", "Variable ordering by one metric; one name per line");
    order_cmd->add_option("input", input, "CSV file")->required();
    order_cmd->add_option("-o,--output", output, "Output file (default stdout)");
    order_cmd->add_option("--metric", metric_name, "q_am, jm_mag, jm_dir, jm_abs, cm_did or cm_h")
        ->capture_default_str();
    order_cmd->add_flag("--ascending", ascending, "q_am only: lowest first");
    order_cmd->add_option("--aggregate", aggregate_name, "Folds CM directions: max, min or avg")
        ->capture_default_str();
    order_cmd->add_flag("--json", as_json, "Print the permutation and anchor pair as JSON");
    add_ingest_flags(order_cmd, ingest);

    std::string op = ">", filter_text;
    std::optional<double> threshold;
    std::optional<std::size_t> top_n;
    auto* select_cmd = app.add_subcommand("select", "Variables passing a threshold or filter; one name per line");
    select_cmd->add_option("input", input, "CSV file")->required();
    select_cmd->add_option("-o,--output", output, "Output file (default stdout)");
    select_cmd->add_option("--metric", metric_name, "Metric to threshold")->capture_default_str();
    select_cmd->add_option("--op", op, "<, <=, > or >=")->capture_default_str();
    select_cmd->add_option("--threshold", threshold, "Threshold value (omit to rank all)");
    select_cmd->add_option("--top-n", top_n, "Keep the first N after ranking");
    select_cmd->add_option("--filter", filter_text, "Conjunctive pair filter, e.g. \"jm_dir<0.05,cm_did>0.9\"");
    select_cmd->add_option("--aggregate", aggregate_name, "Folds CM directions: max, min or avg")
        ->capture_default_str();
    add_ingest_flags(select_cmd, ingest);

    std::string mode_name, spec_path, manifest_path;
    std::optional<std::uint64_t> seed;
    auto* gen_cmd = app.add_subcommand("generate", "Inject synthetic missingness into a complete dataset");
    gen_cmd->add_option("mode", mode_name, "am, jm or cm")->required();
    gen_cmd->add_option("input", input, "Complete CSV file (default: the spec's \"source\", relative to the spec)");
    gen_cmd->add_option("--spec", spec_path, "Generator spec JSON")->required();
    gen_cmd->add_option("--seed", seed, "Overrides the spec's seed");
    gen_cmd->add_option("-o,--output", output, "Output CSV (default stdout)");
    gen_cmd->add_option("--manifest", manifest_path, "Ground-truth manifest JSON output");
    add_ingest_flags(gen_cmd, ingest);

    auto* net_cmd = app.add_subcommand("export-network", "Write nodes.csv and edges.csv for network tools");
    net_cmd->add_option("input", input, "CSV file")->required();
    net_cmd->add_option("-o,--output", output, "Output directory")->required();
    net_cmd->add_option("--filter", filter_text, "Conjunctive edge filter, e.g. \"jm_dir<0.05,cm_did>0.9\"");
    net_cmd->add_option("--aggregate", aggregate_name, "Folds CM directions: max, min or avg")
        ->capture_default_str();
    add_ingest_flags(net_cmd, ingest);

    std::optional<std::string> host, static_dir;
    std::optional<int> port;
    auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP/JSON service");
    serve_cmd->add_option("--host", host, "Bind address (env MISSQ_BIND, default 127.0.0.1)");
    serve_cmd->add_option("--port", port, "Port, 0 for any free port (env MISSQ_PORT, default 8750)");
    serve_cmd->add_option("--static", static_dir, "Directory served at / (env MISSQ_STATIC_DIR)");
    serve_cmd->add_option("--load", input, "CSV file to register on startup");
    add_ingest_flags(serve_cmd, ingest);

    std::vector<std::string> argv(args.rbegin(), args.rend());
    try {
        app.parse(argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n";
        const auto subs = app.get_subcommands();
        err << (subs.empty() ? app.help() : subs.front()->help());
        return kUsage;
    }

    try {
        const IngestConfig config = ingest_config(ingest);
        const auto load = [&] { return load_csv(input, config); };

        if (profile_cmd->parsed()) {
            const auto d = load();
            const auto p = profile(d);
            emit(output, out, [&](std::ostream& o) { write_profile_csv(o, p); });
        } else if (jm_cmd->parsed() || cm_cmd->parsed()) {
            const bool cond = cm_cmd->parsed();
            if (metrics.empty())
                metrics = cond ? std::vector<std::string>{"cm_did", "cm_h"}
                               : std::vector<std::string>{"jm_mag", "jm_dir", "jm_abs"};
            const auto d = load();
            const auto q = compute_quality_matrices(d, {.conditional = cond});
            std::vector<const PairwiseQMMatrix*> ms;
            for (const auto& name : metrics) {
                const auto m = parse_metric(name);
                if (!is_pairwise(m) || is_conditional(m) != cond)
                    throw ValidationError("metric '" + name + "' is not produced by this subcommand");
                ms.push_back(&q.get(m));
            }
            emit(output, out, [&](std::ostream& o) { export_matrices_csv(o, ms); });
        } else if (order_cmd->parsed()) {
            const auto metric = parse_metric(metric_name);
            const auto agg = parse_aggregate(aggregate_name);
            const auto d = load();
            VariableOrdering o;
            if (metric == MetricId::q_am) {
                o = order_by_univariate(profile(d), !ascending);
            } else {
                const auto q = compute_quality_matrices(d, {.conditional = is_conditional(metric), .aggregate = agg});
                o = order_by_pairwise(q.get(metric), agg);
            }
            emit(output, out, [&](std::ostream& s) {
                if (as_json) s << to_json(o, d).dump(2) << '\n';
                else print_names(s, d, o.permutation);
            });
        } else if (select_cmd->parsed()) {
            const auto agg = parse_aggregate(aggregate_name);
            const auto d = load();
            std::vector<std::size_t> picked;
            if (!filter_text.empty()) {
                if (threshold) throw ValidationError("--filter and --threshold are exclusive");
                const auto filter = EdgeFilter::parse(filter_text);
                bool cond = false;
                for (const auto& p : filter.predicates) cond |= is_conditional(p.metric);
                const auto q = compute_quality_matrices(d, {.conditional = cond, .aggregate = agg});
                picked = threshold_select(q, filter, top_n);
            } else {
                const auto metric = parse_metric(metric_name);
                const auto cmp = comparison_from(op, threshold);
                if (metric == MetricId::q_am) {
                    picked = threshold_select(profile(d), cmp, top_n);
                } else {
                    const auto q =
                        compute_quality_matrices(d, {.conditional = is_conditional(metric), .aggregate = agg});
                    picked = threshold_select(q, metric, cmp, top_n);
                }
            }
            emit(output, out, [&](std::ostream& s) { print_names(s, d, picked); });
        } else if (gen_cmd->parsed()) {
            const auto mode = parse_gen_mode(mode_name);
            Json spec_json = read_json_file(spec_path);
            if (!spec_json.is_object()) throw ValidationError("generator spec must be a JSON object");
            if (!spec_json.contains("mode")) spec_json["mode"] = std::string(to_string(mode));
            auto spec = spec_from_json(spec_json);
            if (spec.mode != mode)
                throw ValidationError("spec mode '" + std::string(to_string(spec.mode)) + "' differs from '" +
                                      mode_name + "'");
            if (seed) spec.seed = *seed;
            std::filesystem::path source = input;
            if (source.empty()) {
                if (!spec_json.contains("source") || !spec_json.at("source").is_string())
                    throw ValidationError("no input CSV given and the spec has no \"source\"");
                source = spec_json.at("source").get<std::string>();
                if (source.is_relative()) source = std::filesystem::path(spec_path).parent_path() / source;
            }
            const auto gen = inject(load_csv(source, config), spec);
            emit(output, out, [&](std::ostream& o) { write_csv(o, gen.dataset); });
            if (!manifest_path.empty())
                emit(manifest_path, out, [&](std::ostream& o) { o << to_json(gen.manifest).dump(2) << '\n'; });
        } else if (net_cmd->parsed()) {
            const auto filter = EdgeFilter::parse(filter_text);
            const auto d = load();
            const auto q = compute_quality_matrices(d, {.conditional = true, .aggregate = parse_aggregate(aggregate_name)});
            const auto net = export_network(profile(d), q, filter);
            write_network(output, net);
            err << net.nodes.size() << " nodes, " << net.edges.size() << " edges written to " << output << '\n';
        } else if (serve_cmd->parsed()) {
            auto cfg = service::config_from_env();
            cfg.ingest = config;
            if (host) cfg.host = *host;
            if (port) {
                if (*port < 0 || *port > 65535) throw ValidationError("--port must be in 0..65535");
                cfg.port = *port;
            }
            if (static_dir) cfg.static_dir = *static_dir;
            service::Server server(cfg);
            if (!input.empty()) server.session().add(load(), input, config);
            g_server = &server;
            std::signal(SIGINT, on_signal);
            std::signal(SIGTERM, on_signal);
            server.run([&](int bound) {
                err << "listening on http://" << cfg.host << ':' << bound << '\n';
            });
            g_server = nullptr;
        }
    } catch (const FeasibilityError& e) {
        err << "error: " << e.what() << " (bound: " << e.bound() << ")\n";
        return kFeasibility;
    } catch (const IngestError& e) {
        err << "error: " << e.what() << '\n';
        return kIngest;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return code_for(e);
    }
    return kOk;
}

}  // namespace missq::cli
