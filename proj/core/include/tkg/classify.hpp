#pragma once
// Per-object classification: one binary node per relevant (concept, chunk)
// pair, connected where two concepts are discussed by the same chunk.
// Pass 1 activates nodes whose empirical CDF value exceeds alpha; pass 2
// activates remaining nodes above beta that neighbor an alpha-activated
// node. Beta activation does not propagate further (single pass).

#include "tkg/graph.hpp"
#include "tkg/scoring.hpp"

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tkg {

enum class Activation { none, alpha, beta };

const char* activation_name(Activation a);

struct ClassificationNode {
    std::string concept_id;
    std::string chunk_id;
    double w = 0.0;
    double p = 0.0; // empirical CDF value of w under the concept's distribution
    int state = 0;
    Activation activated_by = Activation::none;
};

struct ClassificationGraph {
    std::string object_id;
    std::vector<ClassificationNode> nodes; // ordered by (concept_id, chunk_id)
    std::vector<std::pair<std::size_t, std::size_t>> interaction_edges; // i < j
};

struct Thresholds {
    double alpha = 0.9;
    double beta = 0.5;

    // beta > alpha is semantically useless but harmless.
    std::optional<std::string> warning() const;
};

// One node per (c, t) where both e_{o,c} and e_{c,t} exist; interaction
// edges between nodes sharing a chunk under distinct concepts.
// Throws Error(unknown_object), Error(missing_distribution),
// Error(missing_embedding).
ClassificationGraph build_classification_graph(
    const TripartiteGraph& g, const std::map<std::string, ConceptDistribution>& distributions,
    const std::string& object_id);

struct ClassifyOptions {
    // Config-gated experiment: iterate the beta rule to a fixed point so
    // beta-activated nodes can activate further neighbors. Off by default.
    bool propagate_beta = false;
};

// Assigns states in place. Pure given its inputs; node visit order never
// changes the result.
void classify(ClassificationGraph& cg, const Thresholds& thresholds,
              const ClassifyOptions& options = {});

struct SelectedPair {
    std::string concept_id;
    std::string chunk_id;
    Activation activated_by = Activation::none;
};

// State-1 nodes ordered by (concept_id, activation, chunk_id) with alpha
// before beta, so alpha entries of a concept precede its beta entries.
std::vector<SelectedPair> selected_pairs(const ClassificationGraph& cg);

// --- artifacts -------------------------------------------------------------

std::string classification_to_json(const ClassificationGraph& cg, const Thresholds& thresholds);
void write_classification_json(const std::filesystem::path& path, const ClassificationGraph& cg,
                               const Thresholds& thresholds);

struct StoredClassification {
    ClassificationGraph graph; // interaction edges are not persisted
    Thresholds thresholds;
};
StoredClassification load_classification_json(const std::filesystem::path& path);

} // namespace tkg
