#pragma once
// Prompt assembly: a query block, then per concept (in ontology
// declaration order) the object-side summary followed by that concept's
// selected chunk summaries in document order, each carrying provenance.

#include "tkg/classify.hpp"
#include "tkg/graph.hpp"
#include "tkg/ontology.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tkg {

struct QueryTemplate {
    // Placeholder: {object_title}
    std::string text =
        "Cross-examine all findings recorded for {object_title} against the "
        "literature excerpts provided below. For each finding, state whether the "
        "excerpts support, contradict, or refine it, citing the bracketed source "
        "references.";

    std::string render(const std::string& object_title) const;
};

struct Provenance {
    std::string doc_id;
    std::string heading;
    std::string chunk_id;
};

struct PromptBlock {
    enum class Kind { query, object_concept_summary, concept_chunk_summary };
    Kind kind = Kind::query;
    std::string concept_id; // empty for the query block
    std::string text;
    std::optional<Provenance> provenance; // concept_chunk_summary blocks only
};

class TokenCounterBackend {
public:
    virtual ~TokenCounterBackend() = default;
    virtual std::size_t count(const std::string& text) const = 0;
};

// ceil(character count / 4); avoids any external tokenizer dependency.
class HeuristicTokenCounter final : public TokenCounterBackend {
public:
    std::size_t count(const std::string& text) const override;
};

std::size_t count_tokens(const std::string& text, const TokenCounterBackend& counter);

struct PromptPlan {
    std::string object_id;
    std::vector<PromptBlock> blocks;
    std::size_t token_count = 0; // tokens of the rendered plan
};

// Block order: query first; then per concept with an e_{o,c} edge, in
// ontology declaration order, the object summary followed by the selected
// chunk summaries sorted by document order. Concepts with no selected
// chunk still contribute their object summary block.
// Throws Error(unclassified_object), Error(unknown_concept).
PromptPlan assemble_prompt(const std::string& object_id, const TripartiteGraph& g,
                           const ClassificationGraph& classification,
                           const QueryTemplate& query_template, const Ontology& ontology,
                           const TokenCounterBackend& counter = HeuristicTokenCounter{});

// Deterministic plain-text rendering: one labeled segment per block,
// provenance as a trailing "[doc_id § heading / chunk_id]" line.
std::string render(const PromptPlan& plan);

std::string plan_to_json(const PromptPlan& plan);
void write_plan_json(const std::filesystem::path& path, const PromptPlan& plan);

} // namespace tkg
