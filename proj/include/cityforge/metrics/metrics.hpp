#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "cityforge/agents/agents.hpp"
#include "cityforge/core/error.hpp"

namespace cityforge::metrics {

enum class MetricsErrc { EmptyLog, NoExecutions, EmptyCorpus };

using MetricsError = CodedError<MetricsErrc>;

struct RunRecord {
    std::size_t index = 0;
    std::string instruction;
    std::size_t proposed = 0;
    std::size_t executed = 0;
    std::size_t correct = 0;
    int rounds = 0;
    bool committed = false;
    std::string error;  // AgentErrc label, empty when the run had none
    std::string error_message;
    std::vector<std::string> trace;  // "classname:outcome" per execution
    bool passed = false;             // final evaluation
};

struct RunLog {
    std::uint64_t seed = 0;
    std::vector<RunRecord> records;

    std::size_t proposed() const;
    std::size_t executed() const;
    std::size_t correct() const;
};

/// Executed over proposed actions, summed over every record.
double er_at_1(const RunLog& log);
/// Correct over executed actions, summed over every record.
double sr_at_1(const RunLog& log);

/// "ER@1 94.00  SR@1 82.98"; SR prints as "-" when nothing executed.
std::string format_line(const RunLog& log);

RunRecord to_record(std::size_t index, const agents::RunResult& result);

struct CorpusOptions {
    bool parallel = false;
    unsigned threads = 0;  // 0: hardware concurrency
};

/// One instruction per non-blank line. Throws Error when unreadable and
/// MetricsError{EmptyCorpus} when there are no instructions.
std::vector<std::string> read_corpus(const std::string& path);

/// Runs the corpus against a scene ingested from `inputs`. Sequential mode
/// shares one session. Parallel mode runs the first entry, then every other
/// entry in its own copy of that session; records merge by corpus index.
RunLog run_corpus(const std::vector<std::string>& corpus, const agents::Engine& engine,
                  const agents::SceneInputs& inputs, CorpusOptions options = {});

std::string run_log_json(const RunLog& log);

}  // namespace cityforge::metrics
