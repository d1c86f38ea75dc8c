#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cityforge/assets/assets.hpp"
#include "cityforge/core/error.hpp"
#include "cityforge/layout/layout.hpp"
#include "cityforge/protocol/protocol.hpp"
#include "cityforge/raster/raster.hpp"
#include "cityforge/scene/scene.hpp"

namespace cityforge::agents {

enum class AgentErrc { Uninterpretable, Unsatisfiable, ArgumentBinding, ActionFailed };

std::string_view errc_label(AgentErrc kind);

class AgentError : public CodedError<AgentErrc> {
public:
    AgentError(AgentErrc kind, std::string detail, const std::string& message)
        : CodedError<AgentErrc>(kind, message), detail_(std::move(detail)) {}

    /// Instruction text, format label, parameter name or classname.
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string detail_;
};

struct PoolEntry {
    std::uint64_t seq = 0;
    std::string topic;
    std::string producer;
    std::string payload;  // JSON text
};

/// Append-only store shared by the agents of one session.
class MessagePool {
public:
    MessagePool() = default;
    MessagePool(const MessagePool& other);
    MessagePool& operator=(const MessagePool& other);

    /// Returns the new entry's seq.
    std::uint64_t publish(std::string topic, std::string producer, std::string payload);

    std::vector<PoolEntry> entries() const;
    std::vector<PoolEntry> topic(std::string_view name) const;
    std::size_t size() const;
    std::size_t count(std::string_view topic) const;

    /// Value of `key` in the newest "bindings" entry that has it.
    std::optional<std::string> binding(std::string_view key) const;

private:
    mutable std::mutex mutex_;
    std::vector<PoolEntry> entries_;
    std::uint64_t next_ = 1;
};

struct GuidanceDoc {
    std::string text;
};

struct Guidance {
    GuidanceDoc annotator;
    GuidanceDoc planner;
    GuidanceDoc executor;
    GuidanceDoc evaluator;
};

Guidance default_guidance();

/// Reads annotator.txt, planner.txt, executor.txt and evaluator.txt from
/// `dir`; a missing file keeps the default text, an empty one throws.
Guidance load_guidance(const std::string& dir);

// ---------------------------------------------------------------- annotator

struct Concept {
    std::string name;
    std::vector<std::string> stems;
};

/// conversion, generation, retrieval, placement, extraction, meshing.
const std::vector<Concept>& concept_table();

/// Step 1: concepts whose stems occur at least twice over all description
/// words and classname tokens. Step 2: each manifest is tagged with every
/// vocabulary concept whose stem starts a word of its description. Labels go
/// to the pool under "labels" (nothing is published for an empty registry).
/// Returns the sorted vocabulary.
std::vector<std::string> annotate(protocol::ActionRegistry& registry, MessagePool& pool);

// ---------------------------------------------------------------- planning

struct ActionStep {
    std::string classname;
    std::map<std::string, std::string> arguments;  // from the instruction
    std::optional<protocol::DataFormat> produces;
    bool inserted = false;  // conversion added to close a format gap
    bool executed = false;
};

struct Workflow {
    std::vector<ActionStep> steps;

    bool done() const;
};

/// Structured form of a grammar instruction:
/// `<verb> <class|object-name> [by <number>[%]] [to <value>]`.
struct Goal {
    std::string verb;
    std::vector<std::string> selector;
    std::optional<double> amount;
    bool percent = false;
    std::optional<std::string> value;
};

struct Instruction {
    std::string text;
    std::optional<Goal> goal;
};

/// Throws Uninterpretable.
Goal parse_instruction(std::string_view text);

/// Class named by a selector word ("buildings" -> "building"), if any.
std::optional<std::string> class_word(std::string_view word);
/// Looks like an object name: lowercase words joined by '_' ending in digits.
bool object_name_like(std::string_view word);

/// Goal step for a parsed goal. Object selectors become "class:<c>" or the
/// object name. Throws Uninterpretable.
ActionStep goal_step(const Goal& goal);

class LanguageClient {
public:
    virtual ~LanguageClient() = default;
    /// Fills instruction.goal when the client works through the grammar.
    /// Throws Uninterpretable.
    virtual ActionStep interpret(Instruction& instruction, const protocol::ActionRegistry& registry,
                                 const GuidanceDoc& guidance) const = 0;
};

class RuleLanguageClient : public LanguageClient {
public:
    ActionStep interpret(Instruction& instruction, const protocol::ActionRegistry& registry,
                         const GuidanceDoc& guidance) const override;
};

/// Manifests forming the conversion graph: the registered builtins plus any
/// action whose classname ends in "_conversion", sorted by classname.
std::vector<const protocol::ActionManifest*> conversion_edges(const protocol::ActionRegistry& registry);

/// Shortest conversion chain from `available` to a set containing `target`;
/// ties go to the lexicographically smallest classname sequence. An edge
/// applies when all its input formats are present. Empty when target is
/// already available; throws Unsatisfiable when unreachable.
std::vector<const protocol::ActionManifest*> shortest_chain(
    const std::vector<const protocol::ActionManifest*>& edges, protocol::FormatSet available,
    protocol::DataFormat target);

/// Binding for `param` in the pool: the newest value under its own name, or
/// under "obj_name" for parameters ending in "obj_name".
std::optional<std::string> pool_binding(const MessagePool& pool, const std::string& param);

/// Formats a step still needs: inputs not bound by the instruction or the
/// pool and without a default value.
protocol::FormatSet required_formats(const protocol::ActionManifest& manifest, const ActionStep& step,
                                     const MessagePool* pool = nullptr);

/// Goal step preceded by the conversions closing each missing format, in
/// format order. Published under "workflow" when `pool` is given.
Workflow plan_workflow(const protocol::ActionRegistry& registry, const ActionStep& goal,
                       protocol::FormatSet available, MessagePool* pool = nullptr);

/// Earliest unexecuted step whose required formats are available;
/// otherwise the first conversion towards the earliest step's first
/// missing format (marked inserted). Throws Unsatisfiable.
ActionStep next_action(const protocol::ActionRegistry& registry, const Workflow& workflow,
                       protocol::FormatSet available, const MessagePool* pool = nullptr);

// ---------------------------------------------------------------- execution

/// What implementations can reach besides the scene.
struct ActionContext {
    std::shared_ptr<assets::AssetLibrary> library;
    std::shared_ptr<const scene::PresetTable> presets;
    layout::LayoutParams layout_params;
};

struct ExecutionRecord {
    std::string classname;
    std::map<std::string, std::string> arguments;
    std::string outcome;  // "ok" or the failure message
    protocol::FormatSet available_before = 0;
    protocol::FormatSet required = 0;
    std::optional<protocol::DataFormat> produced;
    std::uint64_t revision = 0;  // after the step
};

/// Binds arguments (instruction, pool bindings, workspace, manifest default),
/// runs the implementation on a copy of the state and commits it: revision
/// +1, produced format added, record under "trace" and the published
/// bindings under "bindings". Throws ArgumentBinding or ActionFailed with the
/// state untouched (the failure goes under "failures").
ExecutionRecord execute(const protocol::ActionRegistry& registry, ActionContext& context, const ActionStep& step,
                        scene::SceneState& state, MessagePool& pool);

/// Builtin conversions plus the engine's scene actions, with implementations.
protocol::ActionRegistry make_registry();

// ---------------------------------------------------------------- evaluation

struct EvalOptions {
    double threshold = 0.85;
};

struct EvalReport {
    bool passed = false;
    std::map<std::string, double> per_class_iou;
    std::vector<std::string> violations;
    std::shared_ptr<const raster::ClassGrid> rendered;

    /// 1.0 when no class was compared.
    double min_iou() const;
};

/// Painter's order of the rendered classes; other classes are not drawn.
const std::vector<std::string>& class_priority();

/// Top-down orthographic render at the grid's resolution: a pixel takes the
/// class of the last triangle (in painter's order) covering its centre.
/// Unpainted pixels are "ground" when the grid has that label.
raster::ClassGrid render_semantic(const scene::SceneState& state, const raster::ClassGrid& like);

/// IoU per priority class present in either grid.
std::map<std::string, double> class_iou(const raster::ClassGrid& rendered, const raster::ClassGrid& reference);

/// Building footprint overlaps above 1e-6 m^2 and objects leaving the scene
/// bounds.
std::vector<std::string> structural_violations(const scene::SceneState& state);

/// Deterministic default evaluator.
EvalReport evaluate(const scene::SceneState& state, const raster::ClassGrid* reference, const EvalOptions& options = {});

/// One flat object per region of a priority class, traced along pixel edges.
scene::SceneState scene_from_grid(const raster::ClassGrid& grid);

class VisionClient {
public:
    virtual ~VisionClient() = default;
    virtual EvalReport evaluate(const scene::SceneState& state, const Instruction& instruction,
                                const GuidanceDoc& guidance, const raster::ClassGrid* reference) const = 0;
};

class RuleVisionClient : public VisionClient {
public:
    explicit RuleVisionClient(EvalOptions options = {}) : options_(options) {}
    EvalReport evaluate(const scene::SceneState& state, const Instruction& instruction, const GuidanceDoc& guidance,
                        const raster::ClassGrid* reference) const override;

private:
    EvalOptions options_;
};

// ---------------------------------------------------------------- engine

struct SceneInputs {
    std::optional<std::string> osm_xml;
    std::optional<std::vector<std::uint8_t>> semantic_png;
    bool satellite = false;  // quantize instead of exact colors
    std::optional<std::vector<std::uint8_t>> height_png;
    double cell_size = 1.0;     // meters per semantic/height pixel
    double height_scale = 0.1;  // meters per height unit
    raster::Palette palette = raster::default_palette();
    std::uint64_t seed = 0;
    std::string style;
    std::string weather;
};

/// Parses the inputs into an empty scene with its available formats.
/// Ingest errors propagate (osm, raster); throws cityforge::Error when no
/// layout input is given or both OSM and a semantic map are.
scene::SceneState ingest(const SceneInputs& inputs);

/// Fixed procedural catalog: 12 trees, 12 streetlamps and 12 buildings.
/// Runs never add to it, so retrieval results do not depend on session history.
std::shared_ptr<assets::AssetLibrary> default_library();

struct EngineConfig {
    std::uint64_t seed = 0;
    Guidance guidance = default_guidance();
    std::shared_ptr<const LanguageClient> language;  // rule-based when null
    std::shared_ptr<const VisionClient> vision;      // rule-based when null
    std::shared_ptr<assets::AssetLibrary> library;   // default_library() when null
    std::shared_ptr<const scene::PresetTable> presets;
    layout::LayoutParams layout_params;
    int max_replans = 2;
};

struct RunResult {
    std::string instruction;
    std::optional<AgentErrc> error;
    std::string error_message;
    Workflow workflow;  // last round
    std::vector<ExecutionRecord> executions;
    std::size_t proposed = 0;
    std::size_t executed = 0;
    std::size_t correct = 0;
    int rounds = 0;
    EvalReport report;
    bool committed = false;
};

/// Magnitude of a replanned step: scale factors f become 1 + (f - 1) / 2^round
/// and amounts shrink by 2^round. Nullopt when the step has no magnitude.
std::optional<ActionStep> damped(const ActionStep& step, int round);

class Engine {
public:
    explicit Engine(EngineConfig config = {});

    const protocol::ActionRegistry& registry() const { return registry_; }
    const std::vector<std::string>& vocabulary() const { return vocabulary_; }
    const EngineConfig& config() const { return config_; }

    /// Publishes the annotator's labels into a new session pool.
    void open_session(MessagePool& pool) const;

    /// Interpret, plan, execute and evaluate one instruction against `state`.
    /// The state changes only when the run is committed: the final
    /// evaluation passed, or `commit_failed` is set and no error occurred.
    /// Uncommitted runs still leave their failures and evaluator feedback in
    /// the pool.
    RunResult run(scene::SceneState& state, MessagePool& pool, const std::string& text,
                  const raster::ClassGrid* reference, bool commit_failed = false) const;

private:
    EngineConfig config_;
    protocol::ActionRegistry registry_;
    std::vector<std::string> vocabulary_;
    std::string labels_payload_;
};

}  // namespace cityforge::agents

namespace cityforge::protocol {

/// One invocation: bound arguments in, mutations on `state`, pool bindings out.
struct ActionCall {
    scene::SceneState& state;
    std::map<std::string, std::string> args;
    agents::ActionContext& context;
    std::map<std::string, std::string> published;

    const std::string& arg(const std::string& name) const;
};

}  // namespace cityforge::protocol
