#include "missq/service.hpp"

#include "missq/errors.hpp"
#include "missq/export.hpp"
#include "missq/filter.hpp"
#include "missq/json_io.hpp"
#include "missq/ordering.hpp"

#include "httplib.h"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

namespace missq::service {

std::string_view to_string(ComputeStatus s) noexcept {
    switch (s) {
        case ComputeStatus::pending: return "pending";
        case ComputeStatus::ready: return "ready";
        case ComputeStatus::failed: return "failed";
    }
    return "unknown";
}

namespace {

int parse_port(std::string_view text, const char* what) {
    int port = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), port);
    if (ec != std::errc{} || ptr != text.data() + text.size() || port < 0 || port > 65535)
        throw ValidationError(std::string(what) + ": '" + std::string(text) + "' is not a port number");
    return port;
}

}  // namespace

ServiceConfig config_from_env(ServiceConfig base) {
    if (const char* bind = std::getenv("MISSQ_BIND"); bind && *bind) {
        std::string_view b(bind);
        const auto colon = b.rfind(':');
        if (colon != std::string_view::npos && b.find(':') == colon) {
            base.host = std::string(b.substr(0, colon));
            base.port = parse_port(b.substr(colon + 1), "MISSQ_BIND");
        } else {
            base.host = std::string(b);
        }
    }
    if (const char* port = std::getenv("MISSQ_PORT"); port && *port) base.port = parse_port(port, "MISSQ_PORT");
    if (const char* dir = std::getenv("MISSQ_STATIC_DIR"); dir && *dir) base.static_dir = dir;
    return base;
}

// ---------------------------------------------------------------------------
// Registry

DatasetVersion::DatasetVersion(std::string id, std::uint64_t version, IncompleteDataset dataset)
    : id_(std::move(id)), version_(version), dataset_(std::move(dataset)) {
    if (dataset_.item_count() > 0) profile_ = missq::profile(dataset_);
}

ComputeStatus DatasetVersion::status() const {
    std::lock_guard lock(mutex_);
    return status_;
}

std::string DatasetVersion::error() const {
    std::lock_guard lock(mutex_);
    return error_;
}

std::shared_ptr<const QualityMatrices> DatasetVersion::matrices() const {
    std::lock_guard lock(mutex_);
    return matrices_;
}

ComputeStatus DatasetVersion::wait() const {
    std::unique_lock lock(mutex_);
    done_.wait(lock, [&] { return status_ != ComputeStatus::pending; });
    return status_;
}

void DatasetVersion::finish(std::shared_ptr<const QualityMatrices> m, std::string error) {
    {
        std::lock_guard lock(mutex_);
        matrices_ = std::move(m);
        error_ = std::move(error);
        status_ = matrices_ ? ComputeStatus::ready : ComputeStatus::failed;
    }
    done_.notify_all();
}

SessionState::~SessionState() {
    std::lock_guard lock(workers_mutex_);
    for (auto& t : workers_) t.join();
}

std::shared_ptr<DatasetVersion> SessionState::start(std::string id, std::uint64_t version, IncompleteDataset d) {
    auto v = std::make_shared<DatasetVersion>(std::move(id), version, std::move(d));
    std::lock_guard lock(workers_mutex_);
    workers_.emplace_back([v] {
        try {
            v->finish(std::make_shared<const QualityMatrices>(compute_quality_matrices(v->dataset())), {});
        } catch (const std::exception& e) {
            v->finish(nullptr, e.what());
        }
    });
    return v;
}

std::shared_ptr<const DatasetVersion> SessionState::add(IncompleteDataset d, std::optional<std::filesystem::path> source,
                                                        IngestConfig ingest, std::optional<GroundTruthManifest> manifest) {
    std::string id;
    {
        std::unique_lock lock(mutex_);
        id = "ds" + std::to_string(next_id_++);
    }
    auto v = start(id, 1, std::move(d));
    v->source_path = std::move(source);
    v->ingest = std::move(ingest);
    v->manifest = std::move(manifest);
    std::unique_lock lock(mutex_);
    datasets_[id] = v;
    return v;
}

std::shared_ptr<const DatasetVersion> SessionState::replace(const std::string& id, IncompleteDataset d,
                                                            std::optional<std::filesystem::path> source,
                                                            IngestConfig ingest) {
    std::uint64_t version = 0;
    {
        std::shared_lock lock(mutex_);
        auto it = datasets_.find(id);
        if (it == datasets_.end()) return nullptr;
        version = it->second->version() + 1;
    }
    auto v = start(id, version, std::move(d));
    v->source_path = std::move(source);
    v->ingest = std::move(ingest);
    std::unique_lock lock(mutex_);
    datasets_[id] = v;
    return v;
}

std::shared_ptr<const DatasetVersion> SessionState::get(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = datasets_.find(id);
    return it == datasets_.end() ? nullptr : it->second;
}

bool SessionState::remove(const std::string& id) {
    std::unique_lock lock(mutex_);
    return datasets_.erase(id) > 0;
}

std::vector<std::shared_ptr<const DatasetVersion>> SessionState::list() const {
    std::shared_lock lock(mutex_);
    std::vector<std::shared_ptr<const DatasetVersion>> out;
    for (const auto& [id, v] : datasets_) out.push_back(v);
    return out;
}

// ---------------------------------------------------------------------------
// HTTP

namespace {

class NotFound : public Error {
public:
    using Error::Error;
};

// Matrix-dependent request on a version whose computation is still running.
struct Pending {};

Json error_body(std::string_view type, const std::string& message) {
    return {{"error", {{"type", type}, {"message", message}}}};
}

void send_json(httplib::Response& res, const Json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, std::exception_ptr ep) {
    try {
        std::rethrow_exception(ep);
    } catch (const NotFound& e) {
        send_json(res, error_body("not_found", e.what()), 404);
    } catch (const IngestError& e) {
        Json body = error_body("ingest", e.what());
        if (e.row() != 0) body["error"]["row"] = e.row();
        if (e.column() != 0) body["error"]["column"] = e.column();
        send_json(res, body, 400);
    } catch (const FeasibilityError& e) {
        Json body = error_body("feasibility", e.what());
        body["error"]["bound"] = e.bound();
        send_json(res, body, 422);
    } catch (const UncomputedError& e) {
        send_json(res, error_body("uncomputed", e.what()), 409);
    } catch (const NoSupportError& e) {
        send_json(res, error_body("no_support", e.what()), 422);
    } catch (const EmptyDatasetError& e) {
        send_json(res, error_body("empty_dataset", e.what()), 422);
    } catch (const TooFewVariablesError& e) {
        send_json(res, error_body("too_few_variables", e.what()), 422);
    } catch (const ValidationError& e) {
        send_json(res, error_body("validation", e.what()), 400);
    } catch (const IoError& e) {
        send_json(res, error_body("io", e.what()), 400);
    } catch (const nlohmann::json::exception& e) {
        send_json(res, error_body("validation", std::string("malformed JSON: ") + e.what()), 400);
    } catch (const std::exception& e) {
        send_json(res, error_body("internal", e.what()), 500);
    } catch (...) {
        send_json(res, error_body("internal", "unknown error"), 500);
    }
}

std::optional<std::string> param(const httplib::Request& req, const char* name) {
    if (!req.has_param(name)) return std::nullopt;
    return req.get_param_value(name);
}

bool flag(const httplib::Request& req, const char* name, bool fallback) {
    const auto v = param(req, name);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || v->empty()) return true;
    if (*v == "false" || *v == "0") return false;
    throw ValidationError(std::string("parameter '") + name + "' must be true or false");
}

std::size_t size_param(const httplib::Request& req, const char* name, std::size_t fallback) {
    const auto v = param(req, name);
    if (!v) return fallback;
    std::size_t out = 0;
    auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc{} || ptr != v->data() + v->size())
        throw ValidationError(std::string("parameter '") + name + "' must be a non-negative integer");
    return out;
}

double finite_number(const std::string& text, const char* name) {
    double out = 0.0;
    const char* first = text.data();
    if (!text.empty() && text.front() == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, text.data() + text.size(), out);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(out))
        throw ValidationError(std::string("parameter '") + name + "' must be a finite number");
    return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

// Query form: delimiter, header, missing_tokens (separated by '|'),
// categorical / numerical (comma-separated column names).
IngestConfig ingest_from_query(const httplib::Request& req, const IngestConfig& base) {
    Json j = Json::object();
    if (auto d = param(req, "delimiter")) j["delimiter"] = (*d == "tab" || *d == "\\t") ? std::string("\t") : *d;
    if (req.has_param("header")) j["header"] = flag(req, "header", true);
    if (auto t = param(req, "missing_tokens")) j["missing_tokens"] = split(*t, '|');
    Json kinds = Json::object();
    for (const char* kind : {"categorical", "numerical"})
        if (auto names = param(req, kind))
            for (const auto& n : split(*names, ','))
                if (!n.empty()) kinds[n] = kind;
    if (!kinds.empty()) j["kind_overrides"] = kinds;
    return ingest_config_from_json(j, base);
}

Json version_json(const DatasetVersion& v) {
    Json j = {{"id", v.id()},
              {"version", v.version()},
              {"status", std::string(to_string(v.status()))},
              {"summary", summary_json(v.dataset())},
              {"has_manifest", v.manifest.has_value()}};
    if (v.status() == ComputeStatus::failed) j["error"] = v.error();
    if (v.source_path) j["source_path"] = v.source_path->string();
    return j;
}

}  // namespace

struct Server::Impl {
    httplib::Server http;
    SessionState& session;
    const ServiceConfig& config;

    Impl(SessionState& s, const ServiceConfig& c) : session(s), config(c) { routes(); }

    std::shared_ptr<const DatasetVersion> dataset(const httplib::Request& req) const {
        const auto& id = req.path_params.at("id");
        auto v = session.get(id);
        if (!v) throw NotFound("unknown dataset id '" + id + "'");
        return v;
    }

    // Matrices for a request; throws Pending while they are being computed
    // unless the caller asked to wait.
    static std::shared_ptr<const QualityMatrices> matrices(const httplib::Request& req, const DatasetVersion& v) {
        ComputeStatus s = v.status();
        if (s == ComputeStatus::pending && flag(req, "wait", false)) s = v.wait();
        if (s == ComputeStatus::pending) throw Pending{};
        if (s == ComputeStatus::failed) throw UncomputedError("matrix computation failed: " + v.error());
        return v.matrices();
    }

    static Aggregate aggregate(const httplib::Request& req, const QualityMatrices& q) {
        const auto a = param(req, "aggregate");
        return a ? parse_aggregate(*a) : q.aggregate();
    }

    template <class Fn>
    static httplib::Server::Handler guarded(Fn fn) {
        return [fn](const httplib::Request& req, httplib::Response& res) {
            try {
                fn(req, res);
            } catch (const Pending&) {
                send_json(res, {{"status", "pending"}}, 202);
            } catch (...) {
                send_error(res, std::current_exception());
            }
        };
    }

    void routes();
};

void Server::Impl::routes() {
    http.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        send_error(res, ep);
    });

    http.Get("/api/health", guarded([](const httplib::Request&, httplib::Response& res) {
                 send_json(res, {{"status", "ok"}});
             }));

    http.Get("/api/datasets", guarded([this](const httplib::Request&, httplib::Response& res) {
                 Json list = Json::array();
                 for (const auto& v : session.list()) list.push_back(version_json(*v));
                 send_json(res, {{"datasets", std::move(list)}});
             }));

    // Upload: body is CSV text, ingest options in the query string.
    http.Post("/api/datasets", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const IngestConfig cfg = ingest_from_query(req, config.ingest);
                  auto d = read_csv_string(req.body, cfg, param(req, "name").value_or("upload"));
                  auto v = session.add(std::move(d), std::nullopt, cfg);
                  send_json(res, version_json(*v), 201);
              }));

    // Load from a server-side path: {"path": ..., "config": {...}, "name": ...}.
    http.Post("/api/datasets/load", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const Json body = Json::parse(req.body);
                  if (!body.is_object() || !body.contains("path") || !body["path"].is_string())
                      throw ValidationError("load needs a JSON body with a string 'path'");
                  const std::filesystem::path path = body["path"].get<std::string>();
                  const IngestConfig cfg =
                      ingest_config_from_json(body.value("config", Json(nullptr)), config.ingest);
                  auto d = load_csv(path, cfg);
                  if (body.contains("name") && body["name"].is_string()) d = d.renamed(body["name"].get<std::string>());
                  auto v = session.add(std::move(d), path, cfg);
                  send_json(res, version_json(*v), 201);
              }));

    http.Get("/api/datasets/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 send_json(res, version_json(*dataset(req)));
             }));

    // Replace with an uploaded CSV body; a new version with fresh caches.
    http.Put("/api/datasets/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto old = dataset(req);
                 const IngestConfig cfg = ingest_from_query(req, old->ingest);
                 auto d = read_csv_string(req.body, cfg, param(req, "name").value_or(old->dataset().name()));
                 send_json(res, version_json(*session.replace(old->id(), std::move(d), std::nullopt, cfg)));
             }));

    // Re-read the source file of a dataset loaded from a path.
    http.Post("/api/datasets/:id/reload", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const auto old = dataset(req);
                  if (!old->source_path) throw ValidationError("dataset '" + old->id() + "' was not loaded from a path");
                  auto d = load_csv(*old->source_path, old->ingest);
                  send_json(res, version_json(*session.replace(old->id(), std::move(d), old->source_path, old->ingest)));
              }));

    http.Delete("/api/datasets/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
                    const auto v = dataset(req);
                    session.remove(v->id());
                    send_json(res, {{"deleted", v->id()}});
                }));

    http.Get("/api/datasets/:id/status", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto v = dataset(req);
                 if (flag(req, "wait", false)) v->wait();
                 Json j = {{"id", v->id()}, {"version", v->version()}, {"status", std::string(to_string(v->status()))}};
                 if (v->status() == ComputeStatus::failed) j["error"] = v->error();
                 send_json(res, j);
             }));

    http.Get("/api/datasets/:id/csv", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 res.set_content(to_csv_string(dataset(req)->dataset()), "text/csv");
             }));

    http.Get("/api/datasets/:id/profile", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto v = dataset(req);
                 if (v->dataset().item_count() == 0) throw EmptyDatasetError();
                 Json j = to_json(v->profile());
                 j["version"] = v->version();
                 send_json(res, j);
             }));

    http.Get("/api/datasets/:id/matrices/jm", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto v = dataset(req);
                 const auto q = matrices(req, *v);
                 send_json(res, {{"version", v->version()},
                                 {"status", "ready"},
                                 {"jm_mag", to_json(q->get(MetricId::jm_mag))},
                                 {"jm_dir", to_json(q->get(MetricId::jm_dir))},
                                 {"jm_abs", to_json(q->get(MetricId::jm_abs))}});
             }));

    http.Get("/api/datasets/:id/matrices/cm", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto v = dataset(req);
                 const auto q = matrices(req, *v);
                 send_json(res, {{"version", v->version()},
                                 {"status", "ready"},
                                 {"aggregate", std::string(to_string(aggregate(req, *q)))},
                                 {"cm_did", to_json(q->get(MetricId::cm_did))},
                                 {"cm_h", to_json(q->get(MetricId::cm_h))}});
             }));

    http.Get("/api/datasets/:id/ordering", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto v = dataset(req);
                 const MetricId metric = parse_metric(param(req, "metric").value_or("q_am"));
                 VariableOrdering o;
                 if (metric == MetricId::q_am) {
                     if (v->dataset().item_count() == 0) throw EmptyDatasetError();
                     o = order_by_univariate(v->profile(), flag(req, "descending", true));
                 } else {
                     const auto q = matrices(req, *v);
                     o = order_by_pairwise(q->get(metric), aggregate(req, *q));
                 }
                 Json j = to_json(o, v->dataset());
                 j["version"] = v->version();
                 send_json(res, j);
             }));

    // ?metric=&op=&threshold=&top_n= or ?filter=jm_dir<0.05,cm_did>0.9&top_n=
    http.Get("/api/datasets/:id/select", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto v = dataset(req);
                 std::optional<std::size_t> top_n;
                 if (req.has_param("top_n")) top_n = size_param(req, "top_n", 0);
                 std::optional<Comparison> cmp;
                 if (auto op = param(req, "op")) {
                     const auto t = param(req, "threshold");
                     if (!t) throw ValidationError("'op' needs a 'threshold'");
                     cmp = Comparison{parse_compare_op(*op), finite_number(*t, "threshold")};
                 } else if (req.has_param("threshold")) {
                     throw ValidationError("'threshold' needs an 'op'");
                 }
                 std::vector<std::size_t> selected;
                 std::string described;
                 if (auto f = param(req, "filter")) {
                     const auto filter = EdgeFilter::parse(*f);
                     selected = threshold_select(*matrices(req, *v), filter, top_n);
                     described = filter.to_string();
                 } else {
                     const MetricId metric = parse_metric(param(req, "metric").value_or("q_am"));
                     if (metric == MetricId::q_am) {
                         if (v->dataset().item_count() == 0) throw EmptyDatasetError();
                         selected = threshold_select(v->profile(), cmp, top_n);
                     } else {
                         selected = threshold_select(*matrices(req, *v), metric, cmp, top_n);
                     }
                     described = std::string(to_string(metric));
                     if (cmp) described += std::string(to_string(cmp->op)) + format_threshold(cmp->threshold);
                 }
                 Json names = Json::array();
                 for (auto j : selected) names.push_back(v->dataset().variable(j).name());
                 send_json(res, {{"version", v->version()},
                                 {"predicate", described},
                                 {"indices", selected},
                                 {"variables", std::move(names)}});
             }));

    // MissiG payload for a selected variable (name or index).
    auto missig = guarded([this](const httplib::Request& req, httplib::Response& res) {
        const auto v = dataset(req);
        const auto sel = param(req, "variable");
        if (!sel) throw ValidationError("parameter 'variable' is required");
        Json j = missig_json(v->dataset(), v->dataset().resolve(*sel));
        j["version"] = v->version();
        send_json(res, j);
    });
    http.Get("/api/datasets/:id/conditional", missig);
    http.Get("/api/datasets/:id/missig", missig);

    http.Get("/api/datasets/:id/items", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto v = dataset(req);
                 Json j = items_json(v->dataset(), size_param(req, "offset", 0), size_param(req, "limit", SIZE_MAX));
                 j["version"] = v->version();
                 send_json(res, j);
             }));

    http.Get("/api/datasets/:id/network", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto v = dataset(req);
                 const auto filter = EdgeFilter::parse(param(req, "filter").value_or(""));
                 const auto q = matrices(req, *v);
                 Json j = to_json(export_network(v->profile(), *q, filter));
                 j["version"] = v->version();
                 send_json(res, j);
             }));

    // Body: a generator spec document; optional "seed" query override.
    http.Post("/api/datasets/:id/generate", guarded([this](const httplib::Request& req, httplib::Response& res) {
                  const auto source = dataset(req);
                  MissingnessSpec spec = spec_from_json(Json::parse(req.body));
                  if (req.has_param("seed")) spec.seed = size_param(req, "seed", 0);
                  auto gen = inject(source->dataset(), spec);
                  Json manifest = to_json(gen.manifest);
                  auto v = session.add(std::move(gen.dataset), std::nullopt, source->ingest, std::move(gen.manifest));
                  Json j = version_json(*v);
                  j["source"] = source->id();
                  j["manifest"] = std::move(manifest);
                  send_json(res, j, 201);
              }));

    http.Get("/api/datasets/:id/manifest", guarded([this](const httplib::Request& req, httplib::Response& res) {
                 const auto v = dataset(req);
                 if (!v->manifest) throw NotFound("dataset '" + v->id() + "' was not produced by the generator");
                 res.set_header("Content-Disposition", "attachment; filename=\"" + v->id() + "_manifest.json\"");
                 send_json(res, to_json(*v->manifest));
             }));

    if (config.static_dir) {
        if (!http.set_mount_point("/", config.static_dir->string()))
            throw IoError("static directory '" + config.static_dir->string() + "' does not exist");
    }
}

Server::Server(ServiceConfig config) : config_(std::move(config)), impl_(std::make_unique<Impl>(session_, config_)) {}

Server::~Server() { stop(); }

int Server::bind() {
    if (config_.port == 0) {
        port_ = impl_->http.bind_to_any_port(config_.host);
        if (port_ < 0) throw IoError("cannot bind " + config_.host);
    } else {
        if (!impl_->http.bind_to_port(config_.host, config_.port))
            throw IoError("cannot bind " + config_.host + ":" + std::to_string(config_.port));
        port_ = config_.port;
    }
    return port_;
}

int Server::start() {
    bind();
    thread_ = std::thread([this] { impl_->http.listen_after_bind(); });
    impl_->http.wait_until_ready();
    return port_;
}

void Server::run(const std::function<void(int)>& on_listening) {
    bind();
    if (on_listening) on_listening(port_);
    impl_->http.listen_after_bind();
}

void Server::stop() {
    if (impl_) impl_->http.stop();
    if (thread_.joinable()) thread_.join();
}

}  // namespace missq::service
