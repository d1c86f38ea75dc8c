#include <algorithm>
#include <filesystem>

#include "cityforge/core/text.hpp"
#include "cityforge/service/service.hpp"

namespace fs = std::filesystem;

namespace cityforge::service {

int http_status(ServiceErrc kind) {
    switch (kind) {
        case ServiceErrc::BadRequest: return 400;
        case ServiceErrc::NotFound: return 404;
        case ServiceErrc::Unprocessable: return 422;
    }
    return 500;
}

struct SceneStore::Session {
    std::string id;
    SceneRequest request;

    // Writer side: held for a whole edit. State and pool are touched only
    // under it.
    std::mutex writer;
    scene::SceneState state;
    agents::MessagePool pool;

    // Reader side: held only to copy or append.
    mutable std::shared_mutex history;
    std::vector<Revision> revisions;
    std::vector<Attempt> attempts;
};

namespace {

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

std::string scene_id(std::uint64_t n) {
    std::string digits = std::to_string(n);
    return "scene-" + std::string(digits.size() < 6 ? 6 - digits.size() : 0, '0') + digits;
}

std::optional<std::uint64_t> id_number(const std::string& id) {
    if (!id.starts_with("scene-") || id.size() == 6) return std::nullopt;
    std::uint64_t n = 0;
    for (char c : id.substr(6)) {
        if (c < '0' || c > '9') return std::nullopt;
        n = n * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return n;
}

Attempt attempt_of(const agents::RunResult& r) {
    Attempt a;
    a.instruction = r.instruction;
    a.proposed = r.proposed;
    a.executed = r.executed;
    a.correct = r.correct;
    a.committed = r.committed;
    if (r.error) a.error = std::string(agents::errc_label(*r.error));
    return a;
}

const char* kUploads[][2] = {{"osm", "osm.xml"}, {"semantic", "semantic.png"}, {"satellite", "satellite.png"},
                             {"height", "height.png"}};

std::optional<std::string>& upload(SceneRequest& r, std::string_view field) {
    if (field == "osm") return r.osm;
    if (field == "semantic") return r.semantic;
    if (field == "satellite") return r.satellite;
    return r.height;
}

}  // namespace

SceneStore::SceneStore(std::shared_ptr<const agents::Engine> engine, raster::Palette palette,
                       std::optional<std::string> persist_dir)
    : engine_(std::move(engine)), palette_(std::move(palette)), persist_dir_(std::move(persist_dir)) {
    if (!engine_) engine_ = std::make_shared<agents::Engine>();
    if (persist_dir_) {
        fs::create_directories(*persist_dir_);
        restore();
    }
}

SceneStore::~SceneStore() = default;

std::shared_ptr<SceneStore::Session> SceneStore::build(const std::string& id, const SceneRequest& request) const {
    if (!request.osm && !request.semantic && !request.satellite)
        throw ServiceError(ServiceErrc::BadRequest, "an osm, semantic or satellite input is required");
    if (request.semantic && request.satellite)
        throw ServiceError(ServiceErrc::BadRequest, "give either a semantic map or a satellite image");
    agents::SceneInputs in;
    in.osm_xml = request.osm;
    if (request.semantic) in.semantic_png = bytes_of(*request.semantic);
    if (request.satellite) {
        in.semantic_png = bytes_of(*request.satellite);
        in.satellite = true;
    }
    if (request.height) in.height_png = bytes_of(*request.height);
    in.cell_size = request.cell_size;
    in.height_scale = request.height_scale;
    in.palette = palette_;
    in.seed = request.seed;
    in.style = request.style;
    in.weather = request.weather;

    auto s = std::make_shared<Session>();
    s->id = id;
    s->request = request;
    try {
        s->state = agents::ingest(in);
    } catch (const Error& e) {
        throw ServiceError(ServiceErrc::BadRequest, e.what());
    }
    engine_->open_session(s->pool);

    const agents::RunResult r =
        engine_->run(s->state, s->pool, "generate city", s->state.data.semantic.get(), /*commit_failed=*/true);
    s->attempts.push_back(attempt_of(r));
    if (r.error) throw ServiceError(ServiceErrc::Unprocessable, r.error_message);
    Revision rev;
    rev.index = 0;
    rev.instruction = r.instruction;
    rev.report = r.report;
    rev.trace = r.executions;
    rev.state = std::make_shared<const scene::SceneState>(s->state);
    rev.model = std::make_shared<const std::vector<std::uint8_t>>(scene::export_glb(s->state).bytes);
    s->revisions.push_back(std::move(rev));
    return s;
}

CreateResult SceneStore::create(const SceneRequest& request) {
    std::string id;
    {
        std::unique_lock lock(mutex_);
        id = scene_id(next_id_++);
    }
    std::shared_ptr<Session> s = build(id, request);
    {
        std::unique_lock lock(mutex_);
        sessions_[id] = s;
    }
    persist_request(id, request);
    persist_session(*s, "");
    return {id, s->revisions.front().report};
}

EditResult SceneStore::apply(Session& s, const std::string& instruction) const {
    EditResult out;
    out.run = engine_->run(s.state, s.pool, instruction, s.state.data.semantic.get());
    std::unique_lock lock(s.history);
    s.attempts.push_back(attempt_of(out.run));
    if (out.run.committed) {
        Revision rev;
        rev.index = s.revisions.size();
        rev.instruction = instruction;
        rev.report = out.run.report;
        rev.trace = out.run.executions;
        rev.state = std::make_shared<const scene::SceneState>(s.state);
        rev.model = std::make_shared<const std::vector<std::uint8_t>>(scene::export_glb(s.state).bytes);
        s.revisions.push_back(std::move(rev));
        out.applied = true;
    }
    out.revision = s.revisions.size() - 1;
    return out;
}

EditResult SceneStore::edit(const std::string& id, const std::string& instruction) {
    std::shared_ptr<Session> s = find(id);
    const std::string text = trim(instruction);
    if (text.empty() || text.find_first_of("\r\n") != std::string::npos)
        throw ServiceError(ServiceErrc::BadRequest, "instruction must be a single non-empty line");
    std::lock_guard writer(s->writer);
    EditResult out = apply(*s, text);
    persist_session(*s, text);
    if (out.run.error == agents::AgentErrc::Uninterpretable || out.run.error == agents::AgentErrc::Unsatisfiable)
        throw ServiceError(ServiceErrc::Unprocessable, out.run.error_message);
    return out;
}

std::shared_ptr<SceneStore::Session> SceneStore::find(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = sessions_.find(id);
    if (it == sessions_.end()) throw ServiceError(ServiceErrc::NotFound, "unknown scene: " + id);
    return it->second;
}

std::shared_ptr<const std::vector<std::uint8_t>> SceneStore::model(const std::string& id,
                                                                   std::optional<std::size_t> revision) const {
    std::shared_ptr<Session> s = find(id);
    std::shared_lock lock(s->history);
    const std::size_t r = revision.value_or(s->revisions.size() - 1);
    if (r >= s->revisions.size())
        throw ServiceError(ServiceErrc::NotFound, "scene " + id + " has no revision " + std::to_string(r));
    return s->revisions[r].model;
}

std::vector<Revision> SceneStore::revisions(const std::string& id) const {
    std::shared_ptr<Session> s = find(id);
    std::shared_lock lock(s->history);
    return s->revisions;
}

std::vector<Attempt> SceneStore::attempts(const std::string& id) const {
    std::shared_ptr<Session> s = find(id);
    std::shared_lock lock(s->history);
    return s->attempts;
}

std::vector<std::string> SceneStore::ids() const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> out;
    for (const auto& [id, s] : sessions_) out.push_back(id);
    return out;
}

// ------------------------------------------------------------ persistence
//
// <dir>/<id>/config.json, the uploads, edits.txt (every attempted edit in
// order), model_<r>.glb per revision and report.json. Restoring replays the
// uploads and edits; runs are deterministic so the revisions come back
// byte-identical.

void SceneStore::persist_request(const std::string& id, const SceneRequest& request) const {
    if (!persist_dir_) return;
    const fs::path dir = fs::path(*persist_dir_) / id;
    fs::create_directories(dir);
    SceneRequest copy = request;
    for (const auto& [field, file] : kUploads) {
        if (const auto& data = upload(copy, field)) write_file((dir / file).string(), *data);
    }
    write_file((dir / "config.json").string(), config_json(request));
    write_file((dir / "edits.txt").string(), "");
}

void SceneStore::persist_session(const Session& s, const std::string& instruction) const {
    if (!persist_dir_) return;
    const fs::path dir = fs::path(*persist_dir_) / s.id;
    if (!instruction.empty()) {
        std::string edits = read_file((dir / "edits.txt").string());
        write_file((dir / "edits.txt").string(), edits + instruction + "\n");
    }
    std::vector<Revision> revs;
    {
        std::shared_lock lock(s.history);
        revs = s.revisions;
    }
    for (const Revision& r : revs) {
        const fs::path p = dir / ("model_" + std::to_string(r.index) + ".glb");
        if (!fs::exists(p)) write_file(p.string(), std::string(r.model->begin(), r.model->end()));
    }
    write_file((dir / "report.json").string(), report_json(s.id));
}

void SceneStore::restore() {
    std::vector<fs::path> dirs;
    for (const fs::directory_entry& e : fs::directory_iterator(*persist_dir_)) {
        if (e.is_directory() && id_number(e.path().filename().string())) dirs.push_back(e.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const fs::path& dir : dirs) {
        const std::string id = dir.filename().string();
        next_id_ = std::max(next_id_, *id_number(id) + 1);
        if (!fs::exists(dir / "config.json")) continue;
        SceneRequest req;
        apply_config_json(req, read_file((dir / "config.json").string()));
        for (const auto& [field, file] : kUploads) {
            if (fs::exists(dir / file)) upload(req, field) = read_file((dir / file).string());
        }
        std::shared_ptr<Session> s = build(id, req);
        const std::string edits = read_file((dir / "edits.txt").string());
        std::size_t pos = 0;
        while (pos < edits.size()) {
            std::size_t nl = edits.find('\n', pos);
            if (nl == std::string::npos) nl = edits.size();
            const std::string line = edits.substr(pos, nl - pos);
            if (!line.empty()) apply(*s, line);
            pos = nl + 1;
        }
        sessions_[id] = s;
    }
}

}  // namespace cityforge::service
