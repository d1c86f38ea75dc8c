// cityforge: generate / eval / serve.
#include <CLI11.hpp>

#include <csignal>
#include <filesystem>
#include <iostream>
#include <pthread.h>
#include <thread>

#include "cityforge/core/text.hpp"
#include "cityforge/metrics/metrics.hpp"
#include "cityforge/service/service.hpp"

namespace fs = std::filesystem;
using namespace cityforge;

namespace {

struct Common {
    std::uint64_t seed = 0;
    std::string palette;
    std::string guidance_dir;
    std::string model_endpoint;
};

struct Inputs {
    std::string osm, semantic, satellite, height;
    double cell_size = 1.0;
    double height_scale = 0.1;
    std::string style, weather;

    bool any() const { return !osm.empty() || !semantic.empty() || !satellite.empty(); }
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--seed", c.seed, "Random seed")->envname("CITYFORGE_SEED");
    app->add_option("--palette", c.palette, "Semantic palette JSON")->envname("CITYFORGE_PALETTE");
    app->add_option("--guidance-dir", c.guidance_dir, "Directory of agent guidance documents")
        ->envname("CITYFORGE_GUIDANCE_DIR");
    app->add_option("--model-endpoint", c.model_endpoint, "Remote language model URL")
        ->envname("CITYFORGE_MODEL_ENDPOINT");
}

void add_inputs(CLI::App* app, Inputs& in) {
    app->add_option("--osm", in.osm, "OpenStreetMap XML");
    app->add_option("--semantic", in.semantic, "Semantic map PNG in palette colors");
    app->add_option("--satellite", in.satellite, "Aerial image PNG, quantized to the palette");
    app->add_option("--height", in.height, "16-bit height map PNG");
    app->add_option("--cell-size", in.cell_size, "Meters per raster pixel")->check(CLI::PositiveNumber);
    app->add_option("--height-scale", in.height_scale, "Meters per height unit");
    app->add_option("--style", in.style, "Initial style preset");
    app->add_option("--weather", in.weather, "Initial weather preset");
}

std::shared_ptr<agents::Engine> make_engine(const Common& c) {
    agents::EngineConfig cfg;
    cfg.seed = c.seed;
    if (!c.guidance_dir.empty()) cfg.guidance = agents::load_guidance(c.guidance_dir);
    if (!c.model_endpoint.empty()) cfg.language = std::make_shared<service::RemoteLanguageClient>(c.model_endpoint);
    return std::make_shared<agents::Engine>(std::move(cfg));
}

raster::Palette make_palette(const Common& c) {
    return c.palette.empty() ? raster::default_palette() : raster::parse_palette(read_file(c.palette));
}

std::optional<std::string> load(const std::string& path) {
    if (path.empty()) return std::nullopt;
    if (!fs::is_regular_file(path)) throw Error("cannot read input: " + path);
    return read_file(path);
}

service::SceneRequest make_request(const Inputs& in, const Common& c) {
    service::SceneRequest r;
    r.osm = load(in.osm);
    r.semantic = load(in.semantic);
    r.satellite = load(in.satellite);
    r.height = load(in.height);
    r.seed = c.seed;
    r.cell_size = in.cell_size;
    r.height_scale = in.height_scale;
    r.style = in.style;
    r.weather = in.weather;
    return r;
}

int cmd_generate(const Common& c, const Inputs& in, const std::string& out, const std::string& obj,
                 std::string report, const std::vector<std::string>& edits) {
    auto engine = make_engine(c);
    service::SceneStore store(engine, make_palette(c));
    const service::CreateResult created = store.create(make_request(in, c));
    bool ok = created.report.passed;
    for (const std::string& e : edits) {
        const service::EditResult r = store.edit(created.id, e);
        if (!r.applied) {
            std::cerr << "edit not applied: " << e << "\n";
            ok = false;
        }
    }
    const std::vector<service::Revision> revs = store.revisions(created.id);
    const service::Revision& last = revs.back();
    ok = ok && last.report.passed;
    write_file(out, std::string(last.model->begin(), last.model->end()));
    if (!obj.empty()) write_file(obj, scene::export_obj(*last.state));
    if (report.empty()) report = fs::path(out).replace_extension(".report.json").string();
    write_file(report, store.report_json(created.id) + "\n");
    if (!ok) {
        std::cerr << "evaluation failed";
        for (const std::string& v : last.report.violations) std::cerr << "; " << v;
        std::cerr << " (min IoU " << format_fixed(last.report.min_iou(), 4) << ")\n";
        return 2;
    }
    return 0;
}

int cmd_eval(const Common& c, Inputs in, const std::string& corpus_path, std::string log_path, bool parallel,
             unsigned threads) {
    const std::vector<std::string> corpus = metrics::read_corpus(corpus_path);
    if (!in.any()) {
        // A corpus ships next to the sample it was written for.
        const fs::path sample = fs::path(corpus_path).parent_path() / "sample.osm";
        if (!fs::is_regular_file(sample)) throw Error("no scene input: pass --osm, --semantic or --satellite");
        in.osm = sample.string();
    }
    auto engine = make_engine(c);
    agents::SceneInputs si;
    if (auto s = load(in.osm)) si.osm_xml = *s;
    for (const auto& [path, sat] : {std::pair{in.semantic, false}, std::pair{in.satellite, true}}) {
        if (auto s = load(path)) {
            si.semantic_png = std::vector<std::uint8_t>(s->begin(), s->end());
            si.satellite = sat;
        }
    }
    if (auto s = load(in.height)) si.height_png = std::vector<std::uint8_t>(s->begin(), s->end());
    si.cell_size = in.cell_size;
    si.height_scale = in.height_scale;
    si.palette = make_palette(c);
    si.seed = c.seed;
    si.style = in.style;
    si.weather = in.weather;
    const metrics::RunLog log = metrics::run_corpus(corpus, *engine, si, {parallel, threads});
    if (log_path.empty()) log_path = "runlog.json";
    write_file(log_path, metrics::run_log_json(log) + "\n");
    std::cout << metrics::format_line(log) << std::endl;
    return 0;
}

int cmd_serve(const Common& c, const std::string& host, int port, const std::string& data_dir) {
    // Signals go to a dedicated thread so shutdown runs outside a handler.
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);

    auto engine = make_engine(c);
    std::optional<std::string> persist;
    if (!data_dir.empty()) persist = data_dir;
    service::SceneStore store(engine, make_palette(c), persist);
    service::HttpServer server(store);
    if (!server.bind({host, port})) {
        std::cerr << "cannot bind " << host << ":" << port << "\n";
        return 1;
    }
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&set, &sig);
        server.stop();
    });
    std::cout << "cityforge listening on http://" << host << ":" << server.port() << "/api/v1" << std::endl;
    server.listen();
    waiter.join();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Procedural city generation from maps and instructions"};
    app.require_subcommand(1);

    Common common;
    Inputs inputs;

    CLI::App* gen = app.add_subcommand("generate", "Build a scene and export it");
    add_common(gen, common);
    add_inputs(gen, inputs);
    std::string out = "city.glb", obj, report;
    std::vector<std::string> edits;
    gen->add_option("-o,--output", out, "Output .glb");
    gen->add_option("--obj", obj, "Also write an OBJ file");
    gen->add_option("--report", report, "Report JSON (default: <output>.report.json)");
    gen->add_option("--edit", edits, "Instruction applied after generation (repeatable)");

    CLI::App* ev = app.add_subcommand("eval", "Run an instruction corpus and print ER@1 / SR@1");
    add_common(ev, common);
    add_inputs(ev, inputs);
    std::string corpus, log_path;
    bool parallel = false;
    unsigned threads = 0;
    ev->add_option("corpus", corpus, "One instruction per line")->required();
    ev->add_option("--log", log_path, "Run log JSON (default: runlog.json)");
    ev->add_flag("--parallel", parallel, "Isolated session per instruction after the first");
    ev->add_option("--threads", threads, "Worker threads for --parallel");

    CLI::App* srv = app.add_subcommand("serve", "Serve the scene API");
    add_common(srv, common);
    std::string host = "127.0.0.1", data_dir;
    int port = 8080;
    srv->add_option("--port", port, "TCP port (0 picks a free one)")->envname("CITYFORGE_PORT");
    srv->add_option("--host", host, "Bind address")->envname("CITYFORGE_HOST");
    srv->add_option("--store-dir", data_dir, "Persist scenes under this directory")->envname("CITYFORGE_STORE_DIR");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e, std::cerr, std::cerr);
        return 1;
    }

    try {
        if (gen->parsed()) {
            if (!inputs.any()) {
                std::cerr << "generate needs --osm, --semantic or --satellite\n\n" << gen->help();
                return 1;
            }
            return cmd_generate(common, inputs, out, obj, report, edits);
        }
        if (ev->parsed()) return cmd_eval(common, inputs, corpus, log_path, parallel, threads);
        return cmd_serve(common, host, port, data_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
