#pragma once
// Naive-RAG baseline and information-density metrics: the comparison runs
// the full tripartite pipeline per object against similarity-threshold
// retrieval over raw chunks, measuring recovered gold concepts per prompt
// token.

#include "tkg/classify.hpp"
#include "tkg/graph.hpp"
#include "tkg/ontology.hpp"
#include "tkg/prompt.hpp"
#include "tkg/scoring.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace tkg {

// Embeds the raw text of every chunk that has no embedding yet. Returns
// the number embedded.
std::size_t embed_chunks(TripartiteGraph& g, EmbedderBackend& backend, bool force = false,
                         int max_in_flight = 4);

// Chunks whose raw-text embedding has cosine(query, chunk) >= min_similarity,
// sorted by similarity descending, ties by chunk_id.
// Throws Error(invalid_config) for min_similarity outside [-1, 1],
// Error(missing_embedding) for unembedded chunks.
std::vector<std::string> naive_rag_select(const std::string& query_text,
                                          const TripartiteGraph& g, EmbedderBackend& embedder,
                                          double min_similarity);

struct DensityReport {
    std::string method; // "tripartite" | "naive"
    std::string object_id;
    std::string config; // threshold settings used
    std::size_t prompt_tokens = 0;
    std::size_t concepts_recovered = 0;
    std::size_t gold_concepts = 0;
    double density = 0.0; // concepts_recovered / prompt_tokens
};

// Counts gold concepts whose marker phrase occurs in the prompt text.
// Throws Error(empty_gold) when the marker map is empty.
DensityReport measure_density(const std::string& prompt_text,
                              const std::map<std::string, std::string>& gold_markers,
                              const TokenCounterBackend& counter);

// Gold file: {"objects": [{object_id, concepts: [{concept_id, chunks: [...]}]}],
//             "markers": {concept_id: marker phrase}}
struct GoldConcept {
    std::string concept_id;
    std::vector<std::string> chunk_ids;
};
struct GoldObject {
    std::string object_id;
    std::vector<GoldConcept> concepts;
};
struct GoldData {
    std::vector<GoldObject> objects;
    std::map<std::string, std::string> markers;

    // Markers of the concepts planted for one object.
    std::map<std::string, std::string> markers_for(const std::string& object_id) const;
};

GoldData load_gold_json(const std::filesystem::path& path);
std::string gold_to_json(const GoldData& gold);

struct ComparisonConfig {
    Thresholds thresholds;
    std::vector<double> naive_minima = {0.15, 0.25, 0.35};
    QueryTemplate query_template;
};

// One tripartite report per object plus one naive report per
// (object, minimum). Requires annotated+embedded edges and embedded chunks.
std::vector<DensityReport> run_comparison(const TripartiteGraph& g, const Ontology& ontology,
                                          const GoldData& gold, const ComparisonConfig& config,
                                          EmbedderBackend& embedder,
                                          const TokenCounterBackend& counter);

// CSV: method,object_id,config,prompt_tokens,concepts_recovered,density
std::string density_to_csv(const std::vector<DensityReport>& reports);
void write_density_csv(const std::filesystem::path& path,
                       const std::vector<DensityReport>& reports);
// Tab-separated variant for plotting tools.
std::string density_to_tsv(const std::vector<DensityReport>& reports);

} // namespace tkg
