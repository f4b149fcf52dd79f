#pragma once
// Local HTTP/JSON service over the engine: dataset registry, cached metrics
// computed in the background, generator runs and static hosting of the UI.

#include "missq/dataset.hpp"
#include "missq/missgen.hpp"
#include "missq/quality.hpp"
#include "missq/univariate.hpp"

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

namespace missq::service {

struct ServiceConfig {
    std::string host = "127.0.0.1";
    /// 0 picks a free port.
    int port = 8750;
    /// Directory served at "/" (the built UI bundle). Optional.
    std::optional<std::filesystem::path> static_dir;
    /// Defaults for uploads that do not override them.
    IngestConfig ingest;
};

/// Applies MISSQ_BIND ("host" or "host:port"), MISSQ_PORT and
/// MISSQ_STATIC_DIR on top of `base`.
ServiceConfig config_from_env(ServiceConfig base = {});

enum class ComputeStatus { pending, ready, failed };
std::string_view to_string(ComputeStatus s) noexcept;

/// One immutable version of a registered dataset plus its derived artifacts.
/// The profile is computed on registration; matrices in the background.
class DatasetVersion {
public:
    DatasetVersion(std::string id, std::uint64_t version, IncompleteDataset dataset);

    const std::string& id() const noexcept { return id_; }
    std::uint64_t version() const noexcept { return version_; }
    const IncompleteDataset& dataset() const noexcept { return dataset_; }
    const MissingnessProfile& profile() const noexcept { return profile_; }

    ComputeStatus status() const;
    std::string error() const;
    /// Null unless status() is ready.
    std::shared_ptr<const QualityMatrices> matrices() const;
    /// Blocks until the computation leaves the pending state.
    ComputeStatus wait() const;

    std::optional<std::filesystem::path> source_path;
    IngestConfig ingest;
    std::optional<GroundTruthManifest> manifest;

private:
    friend class SessionState;
    void finish(std::shared_ptr<const QualityMatrices> m, std::string error);

    std::string id_;
    std::uint64_t version_;
    IncompleteDataset dataset_;
    MissingnessProfile profile_;
    mutable std::mutex mutex_;
    mutable std::condition_variable done_;
    ComputeStatus status_ = ComputeStatus::pending;
    std::shared_ptr<const QualityMatrices> matrices_;
    std::string error_;
};

/// Registry of datasets by id. Registering a dataset starts the matrix
/// computation on a worker thread; replacing an id bumps its version, and
/// readers holding the old version keep a consistent snapshot.
class SessionState {
public:
    SessionState() = default;
    SessionState(const SessionState&) = delete;
    SessionState& operator=(const SessionState&) = delete;
    ~SessionState();

    /// New id ("ds1", "ds2", ...).
    std::shared_ptr<const DatasetVersion> add(IncompleteDataset d, std::optional<std::filesystem::path> source = {},
                                              IngestConfig ingest = {},
                                              std::optional<GroundTruthManifest> manifest = {});
    /// Replaces the dataset under an existing id. Null when the id is unknown.
    std::shared_ptr<const DatasetVersion> replace(const std::string& id, IncompleteDataset d,
                                                  std::optional<std::filesystem::path> source = {},
                                                  IngestConfig ingest = {});
    /// Null when unknown.
    std::shared_ptr<const DatasetVersion> get(const std::string& id) const;
    bool remove(const std::string& id);
    std::vector<std::shared_ptr<const DatasetVersion>> list() const;

private:
    std::shared_ptr<DatasetVersion> start(std::string id, std::uint64_t version, IncompleteDataset d);

    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<DatasetVersion>> datasets_;
    std::uint64_t next_id_ = 1;
    std::mutex workers_mutex_;
    std::vector<std::thread> workers_;
};

/// HTTP front end. `start()` binds and serves on a background thread.
class Server {
public:
    explicit Server(ServiceConfig config);
    ~Server();
    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and starts serving; returns the bound port. Throws IoError when
    /// the address cannot be bound.
    int start();
    /// Binds, calls `on_listening(port)`, then serves on the calling thread
    /// until stop().
    void run(const std::function<void(int)>& on_listening = {});
    void stop();
    int port() const noexcept { return port_; }
    SessionState& session() noexcept { return session_; }

private:
    int bind();

    struct Impl;
    ServiceConfig config_;
    SessionState session_;
    std::unique_ptr<Impl> impl_;
    std::thread thread_;
    int port_ = 0;
};

}  // namespace missq::service
