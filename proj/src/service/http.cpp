#include <httplib.h>

#include <charconv>
#include <sys/socket.h>

#include "cityforge/service/service.hpp"
#include "json_io.hpp"

namespace cityforge::service {

namespace {

constexpr const char* kJson = "application/json";

std::string_view errc_name(ServiceErrc kind) {
    switch (kind) {
        case ServiceErrc::BadRequest: return "BadRequest";
        case ServiceErrc::NotFound: return "NotFound";
        case ServiceErrc::Unprocessable: return "Unprocessable";
    }
    return "Error";
}

void send_error(httplib::Response& res, ServiceErrc kind, const std::string& message) {
    res.status = http_status(kind);
    res.set_content(error_json(errc_name(kind), message), kJson);
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

SceneRequest parse_create(const httplib::Request& req) {
    if (!req.is_multipart_form_data()) {
        if (req.body.empty()) throw ServiceError(ServiceErrc::BadRequest, "empty request");
        throw ServiceError(ServiceErrc::BadRequest, "expected multipart/form-data with the input files");
    }
    SceneRequest r;
    auto text = [&](const char* key) -> std::optional<std::string> {
        if (!req.has_file(key)) return std::nullopt;
        return req.get_file_value(key).content;
    };
    r.osm = text("osm");
    r.semantic = text("semantic");
    r.satellite = text("satellite");
    r.height = text("height");
    if (auto c = text("config")) apply_config_json(r, *c);
    if (auto s = text("seed")) {
        auto v = parse_u64(*s);
        if (!v) throw ServiceError(ServiceErrc::BadRequest, "seed must be an unsigned integer");
        r.seed = *v;
    }
    if (auto s = text("style")) r.style = *s;
    if (auto s = text("weather")) r.weather = *s;
    if (auto s = text("cell_size")) {
        try {
            r.cell_size = std::stod(*s);
        } catch (const std::exception&) {
            throw ServiceError(ServiceErrc::BadRequest, "cell_size must be a number");
        }
        if (!(r.cell_size > 0.0)) throw ServiceError(ServiceErrc::BadRequest, "cell_size must be positive");
    }
    for (auto* f : {&r.osm, &r.semantic, &r.satellite, &r.height}) {
        if (*f && f->value().empty()) *f = std::nullopt;
    }
    return r;
}

}  // namespace

struct HttpServer::Impl {
    SceneStore& store;
    httplib::Server server;
    int port = -1;

    explicit Impl(SceneStore& s) : store(s) {}

    template <typename F>
    void guarded(httplib::Response& res, F&& f) {
        try {
            f();
        } catch (const ServiceError& e) {
            send_error(res, e.kind(), e.what());
        }
    }

    void routes() {
        server.set_socket_options([](socket_t sock) {
            int yes = 1;
            setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
        });
        server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
        server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
            std::string what = "internal error";
            try {
                std::rethrow_exception(ep);
            } catch (const std::exception& e) {
                what = e.what();
            } catch (...) {
            }
            res.status = 500;
            res.set_content(error_json("Internal", what), kJson);
        });
        server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
            if (res.body.empty()) res.set_content(error_json("NotFound", "no such resource"), kJson);
        });

        server.Post("/api/v1/scenes", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const CreateResult c = store.create(parse_create(req));
                res.status = 201;
                res.set_header("Location", "/api/v1/scenes/" + c.id);
                res.set_content(created_json(c), kJson);
            });
        });
        server.Post(R"(/api/v1/scenes/([^/]+)/edits)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                const std::string id = req.matches[1];
                auto text = edit_instruction(req.body, req.get_header_value("Content-Type"));
                store.revisions(id);  // unknown ids are 404 before the body is judged
                if (!text) throw ServiceError(ServiceErrc::BadRequest, "expected {\"instruction\": \"...\"}");
                const EditResult e = store.edit(id, *text);
                res.status = 200;
                res.set_content(edit_json(e), kJson);
            });
        });
        server.Get(R"(/api/v1/scenes/([^/]+)/model\.glb)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] {
                std::optional<std::size_t> rev;
                if (req.has_param("rev")) {
                    auto v = parse_u64(req.get_param_value("rev"));
                    if (!v) throw ServiceError(ServiceErrc::NotFound, "no such revision");
                    rev = static_cast<std::size_t>(*v);
                }
                auto bytes = store.model(req.matches[1], rev);
                res.set_content(reinterpret_cast<const char*>(bytes->data()), bytes->size(), "model/gltf-binary");
            });
        });
        server.Get(R"(/api/v1/scenes/([^/]+)/report)", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { res.set_content(store.report_json(req.matches[1]), kJson); });
        });
        server.Get(R"(/api/v1/scenes/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
            guarded(res, [&] { res.set_content(store.report_json(req.matches[1]), kJson); });
        });
    }
};

HttpServer::HttpServer(SceneStore& store) : impl_(std::make_unique<Impl>(store)) { impl_->routes(); }

HttpServer::~HttpServer() { stop(); }

bool HttpServer::bind(const ServerOptions& options) {
    if (options.port == 0) {
        impl_->port = impl_->server.bind_to_any_port(options.host);
        return impl_->port > 0;
    }
    if (!impl_->server.bind_to_port(options.host, options.port)) return false;
    impl_->port = options.port;
    return true;
}

int HttpServer::port() const { return impl_->port; }

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_) impl_->server.stop();
}

// ------------------------------------------------------------ remote model

RemoteLanguageClient::RemoteLanguageClient(std::string endpoint) : endpoint_(std::move(endpoint)) {}

agents::ActionStep RemoteLanguageClient::interpret(agents::Instruction& instruction,
                                                   const protocol::ActionRegistry& registry,
                                                   const agents::GuidanceDoc& guidance) const {
    // endpoint: scheme://host[:port][/path]
    const std::size_t scheme = endpoint_.find("://");
    const std::size_t path_at = endpoint_.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    const std::string base = path_at == std::string::npos ? endpoint_ : endpoint_.substr(0, path_at);
    const std::string path = path_at == std::string::npos ? "/" : endpoint_.substr(path_at);
    httplib::Client client(base);
    client.set_connection_timeout(10);
    client.set_read_timeout(120);
    auto res = client.Post(path, remote_request_json(instruction, registry, guidance), kJson);
    if (!res || res->status != 200)
        throw agents::AgentError(agents::AgentErrc::Uninterpretable, instruction.text,
                                 "model endpoint unavailable: " + endpoint_);
    agents::ActionStep step = remote_step(res->body);
    if (!registry.contains(step.classname))
        throw agents::AgentError(agents::AgentErrc::Uninterpretable, instruction.text,
                                 "model chose an unknown action: " + step.classname);
    step.produces = registry.manifest(step.classname).output;
    return step;
}

}  // namespace cityforge::service
