#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "cityforge/agents/agents.hpp"
#include "cityforge/core/error.hpp"

namespace cityforge::service {

enum class ServiceErrc { BadRequest, NotFound, Unprocessable };

using ServiceError = CodedError<ServiceErrc>;

int http_status(ServiceErrc kind);

/// Raw uploads as received; kept so a persisted session can be rebuilt.
struct SceneRequest {
    std::optional<std::string> osm;
    std::optional<std::string> semantic;   // exact palette colors
    std::optional<std::string> satellite;  // quantized to the nearest palette color
    std::optional<std::string> height;
    std::uint64_t seed = 0;
    double cell_size = 1.0;
    double height_scale = 0.1;
    std::string style;
    std::string weather;
};

/// Fills the config fields from a JSON object; unknown keys are ignored.
/// Throws BadRequest on malformed JSON or mistyped values.
void apply_config_json(SceneRequest& request, const std::string& json);
std::string config_json(const SceneRequest& request);

struct Revision {
    std::size_t index = 0;
    std::string instruction;
    agents::EvalReport report;
    std::vector<agents::ExecutionRecord> trace;
    std::shared_ptr<const scene::SceneState> state;
    std::shared_ptr<const std::vector<std::uint8_t>> model;  // .glb
};

struct Attempt {
    std::string instruction;
    std::size_t proposed = 0;
    std::size_t executed = 0;
    std::size_t correct = 0;
    bool committed = false;
    std::string error;
};

struct CreateResult {
    std::string id;
    agents::EvalReport report;
};

struct EditResult {
    std::size_t revision = 0;  // latest after the edit
    bool applied = false;
    agents::RunResult run;
};

class SceneStore {
public:
    /// With `persist_dir` set, every scene lives in its own subdirectory and
    /// scenes found there at construction are rebuilt by replaying them.
    explicit SceneStore(std::shared_ptr<const agents::Engine> engine,
                        raster::Palette palette = raster::default_palette(),
                        std::optional<std::string> persist_dir = std::nullopt);
    ~SceneStore();

    /// Ingest, generate and evaluate. The first revision is kept even when
    /// the evaluation fails. Throws BadRequest on ingest errors and
    /// Unprocessable on an unsatisfiable plan.
    CreateResult create(const SceneRequest& request);

    /// Throws NotFound, or Unprocessable for instructions that cannot be
    /// interpreted. Other failures leave the revision unchanged.
    EditResult edit(const std::string& id, const std::string& instruction);

    /// Latest revision when `revision` is empty. Throws NotFound.
    std::shared_ptr<const std::vector<std::uint8_t>> model(const std::string& id,
                                                           std::optional<std::size_t> revision = {}) const;
    std::vector<Revision> revisions(const std::string& id) const;
    std::vector<Attempt> attempts(const std::string& id) const;
    std::string report_json(const std::string& id) const;

    std::vector<std::string> ids() const;

private:
    struct Session;

    std::shared_ptr<Session> find(const std::string& id) const;
    std::shared_ptr<Session> build(const std::string& id, const SceneRequest& request) const;
    EditResult apply(Session& s, const std::string& instruction) const;
    void persist_request(const std::string& id, const SceneRequest& request) const;
    void persist_session(const Session& s, const std::string& instruction) const;
    void restore();

    std::shared_ptr<const agents::Engine> engine_;
    raster::Palette palette_;
    std::optional<std::string> persist_dir_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
};

std::string eval_report_json(const agents::EvalReport& report);

// ------------------------------------------------------------------ HTTP

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8080;
};

class HttpServer {
public:
    explicit HttpServer(SceneStore& store);
    ~HttpServer();

    /// Binds the socket; false when the address is taken. Port 0 picks one.
    bool bind(const ServerOptions& options);
    int port() const;
    /// Blocks until stop().
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// LanguageClient that posts the instruction and the action list to a
/// remote model endpoint and reads back {"classname", "arguments"}.
class RemoteLanguageClient : public agents::LanguageClient {
public:
    explicit RemoteLanguageClient(std::string endpoint);
    agents::ActionStep interpret(agents::Instruction& instruction, const protocol::ActionRegistry& registry,
                                 const agents::GuidanceDoc& guidance) const override;

private:
    std::string endpoint_;
};

}  // namespace cityforge::service
