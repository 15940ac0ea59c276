#pragma once
// Pipeline configuration and step drivers shared by the CLI and the
// test suites. Each step loads its prerequisite artifacts, acts, and
// writes results atomically; steps are idempotent where the underlying
// operation is.

#include "tkg/annotate.hpp"
#include "tkg/baseline.hpp"
#include "tkg/classify.hpp"
#include "tkg/corpus.hpp"
#include "tkg/graph.hpp"
#include "tkg/llm.hpp"
#include "tkg/ontology.hpp"
#include "tkg/prompt.hpp"
#include "tkg/scoring.hpp"

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

namespace tkg {

struct PipelineConfig {
    std::filesystem::path corpus_dir;
    std::filesystem::path ontology_path;
    std::filesystem::path objects_dir;
    std::filesystem::path graph_path = "out/graph.jsonl";
    std::filesystem::path out_dir;       // defaults to graph_path directory
    std::filesystem::path template_path; // optional query template override
    std::filesystem::path gold_path;     // for compare
    std::filesystem::path replay_path;   // fixture for the replay backend
    std::filesystem::path record_path;   // record http traffic when set

    Thresholds thresholds;
    std::string backend = "mock"; // mock | replay | http
    ChunkingConfig chunking;
    std::vector<double> naive_minima = {0.15, 0.25, 0.35};
    llm::BackendConfig llm;
    AnnotationTemplate annotation_template;
    bool propagate_beta = false;

    std::filesystem::path resolved_out_dir() const;
    std::filesystem::path scores_csv_path() const;
    std::filesystem::path distributions_path() const;
    std::filesystem::path classification_path(const std::string& object_id) const;
    std::filesystem::path prompt_text_path(const std::string& object_id) const;
    std::filesystem::path prompt_plan_path(const std::string& object_id) const;
    std::filesystem::path density_csv_path() const;
    std::filesystem::path annotation_report_path() const;
    std::filesystem::path failed_pairs_path() const;
};

// Reads the JSON config file. Relative paths inside the file resolve
// against the file's directory. LLM_API_KEY / LLM_BASE_URL environment
// variables override file values (flags override both, in the CLI).
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

// Throws Error(invalid_config) for broken settings (thresholds outside
// (0, 1], unknown backend, ...).
void validate_pipeline_config(const PipelineConfig& config);

// Annotator plus embedder for the configured backend, owning whatever
// clients they need. Mock and replay backends never touch the network.
struct Backends {
    std::unique_ptr<AnnotatorBackend> annotator;
    std::unique_ptr<EmbedderBackend> embedder;

    // Owned plumbing, unused by callers directly.
    std::unique_ptr<llm::ChatClient> chat;
    std::unique_ptr<llm::EmbeddingClient> embedding;
    std::shared_ptr<llm::ReplayStore> replay;

    void flush(); // persists recordings, if any
};
Backends make_backends(const PipelineConfig& config);

// Exclusive advisory lock next to the graph file; mutating steps hold it
// so only one writer touches a graph at a time.
class GraphLock {
public:
    explicit GraphLock(const std::filesystem::path& graph_path);
    ~GraphLock();
    GraphLock(const GraphLock&) = delete;
    GraphLock& operator=(const GraphLock&) = delete;

private:
    std::filesystem::path lock_path_;
};

// --- steps -------------------------------------------------------------

struct IngestSummary {
    std::size_t documents = 0;
    std::size_t sections = 0;
    std::size_t chunks = 0;
    std::size_t objects = 0;
};
IngestSummary step_ingest(const PipelineConfig& config);

struct PlugOntologySummary {
    std::size_t classes = 0;
    std::size_t concepts = 0;
};
PlugOntologySummary step_plug_ontology(const PipelineConfig& config);

AnnotationReport step_annotate(const PipelineConfig& config);

struct EmbedSummary {
    std::size_t edges_embedded = 0;
    std::size_t chunks_embedded = 0;
    int dimension = 0;
};
EmbedSummary step_embed(const PipelineConfig& config, bool force = false);

struct ScoreSummary {
    std::size_t records = 0;
    std::size_t concepts = 0;
};
ScoreSummary step_score(const PipelineConfig& config);

struct ClassifySummary {
    std::string object_id;
    std::size_t nodes = 0;
    std::size_t alpha_selected = 0;
    std::size_t beta_selected = 0;
    std::string warning;
};
ClassifySummary step_classify(const PipelineConfig& config, const std::string& object_id);

struct PromptSummary {
    std::string object_id;
    std::size_t blocks = 0;
    std::size_t token_count = 0;
    double alpha = 0.0;
    double beta = 0.0;
};
PromptSummary step_prompt(const PipelineConfig& config, const std::string& object_id);

struct CompareSummary {
    std::size_t reports = 0;
    std::filesystem::path csv_path;
};
CompareSummary step_compare(const PipelineConfig& config, bool also_tsv = false);

struct StatsSummary {
    std::size_t documents = 0, sections = 0, chunks = 0;
    std::size_t concept_classes = 0, concepts = 0, objects = 0;
    std::size_t object_concept_edges = 0, concept_chunk_edges = 0, structure_edges = 0;
    std::size_t embedded_edges = 0, embedded_chunks = 0;
    int embedding_dim = 0;
};
StatsSummary step_stats(const PipelineConfig& config);

// Reads the object title ("# Title" first line) and body from a file.
ObjectNode load_object_file(const std::filesystem::path& path);

// Reads the query template (whole file) or returns the default.
QueryTemplate load_query_template(const PipelineConfig& config);

} // namespace tkg
