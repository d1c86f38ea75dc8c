#include "cityforge/metrics/metrics.hpp"

#include <atomic>
#include <filesystem>
#include <thread>

#include "cityforge/core/text.hpp"

namespace cityforge::metrics {

std::size_t RunLog::proposed() const {
    std::size_t n = 0;
    for (const RunRecord& r : records) n += r.proposed;
    return n;
}

std::size_t RunLog::executed() const {
    std::size_t n = 0;
    for (const RunRecord& r : records) n += r.executed;
    return n;
}

std::size_t RunLog::correct() const {
    std::size_t n = 0;
    for (const RunRecord& r : records) n += r.correct;
    return n;
}

double er_at_1(const RunLog& log) {
    const std::size_t p = log.proposed();
    if (p == 0) throw MetricsError(MetricsErrc::EmptyLog, "no proposed actions in the run log");
    return static_cast<double>(log.executed()) / static_cast<double>(p);
}

double sr_at_1(const RunLog& log) {
    const std::size_t e = log.executed();
    if (e == 0) throw MetricsError(MetricsErrc::NoExecutions, "no executed actions in the run log");
    return static_cast<double>(log.correct()) / static_cast<double>(e);
}

std::string format_line(const RunLog& log) {
    std::string out = "ER@1 " + format_fixed(100.0 * er_at_1(log), 2) + "  SR@1 ";
    out += log.executed() == 0 ? "-" : format_fixed(100.0 * sr_at_1(log), 2);
    return out;
}

RunRecord to_record(std::size_t index, const agents::RunResult& result) {
    RunRecord r;
    r.index = index;
    r.instruction = result.instruction;
    r.proposed = result.proposed;
    r.executed = result.executed;
    r.correct = result.correct;
    r.rounds = result.rounds;
    r.committed = result.committed;
    if (result.error) r.error = agents::errc_label(*result.error);
    r.error_message = result.error_message;
    for (const agents::ExecutionRecord& e : result.executions) r.trace.push_back(e.classname + ":" + e.outcome);
    r.passed = result.report.passed;
    return r;
}

std::vector<std::string> read_corpus(const std::string& path) {
    if (!std::filesystem::is_regular_file(path)) throw Error("corpus not readable: " + path);
    const std::string text = read_file(path);
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        std::string line = trim(std::string_view(text).substr(pos, nl - pos));
        if (!line.empty()) out.push_back(std::move(line));
        pos = nl + 1;
    }
    if (out.empty()) throw MetricsError(MetricsErrc::EmptyCorpus, "corpus has no instructions: " + path);
    return out;
}

namespace {

struct Session {
    scene::SceneState state;
    agents::MessagePool pool;
};

RunRecord run_one(const agents::Engine& engine, Session& s, std::size_t index, const std::string& text) {
    const raster::ClassGrid* reference = s.state.data.semantic.get();
    // The first build of an empty scene is kept even when it fails evaluation,
    // so later edits have something to act on.
    const bool commit_failed = s.state.objects.empty();
    return to_record(index, engine.run(s.state, s.pool, text, reference, commit_failed));
}

}  // namespace

RunLog run_corpus(const std::vector<std::string>& corpus, const agents::Engine& engine,
                  const agents::SceneInputs& inputs, CorpusOptions options) {
    if (corpus.empty()) throw MetricsError(MetricsErrc::EmptyCorpus, "empty corpus");
    RunLog log;
    log.seed = inputs.seed;
    log.records.resize(corpus.size());
    Session base{agents::ingest(inputs), {}};
    engine.open_session(base.pool);
    if (!options.parallel) {
        for (std::size_t i = 0; i < corpus.size(); ++i) log.records[i] = run_one(engine, base, i, corpus[i]);
        return log;
    }
    log.records[0] = run_one(engine, base, 0, corpus[0]);
    unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(corpus.size()));
    std::atomic<std::size_t> next{1};
    auto worker = [&] {
        for (std::size_t i = next++; i < corpus.size(); i = next++) {
            Session s{base.state, base.pool};
            log.records[i] = run_one(engine, s, i, corpus[i]);
        }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    return log;
}

}  // namespace cityforge::metrics
