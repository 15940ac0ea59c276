#pragma once
// Concept-anchored pre-analysis. For each (concept, chunk) and
// (object, concept) pair an annotator backend decides whether relevant
// information exists; if so, a concept-specific summary is stored on a
// new annotated edge. Summaries are produced per concept — no cache is
// shared across concepts for the same text.

#include "tkg/graph.hpp"
#include "tkg/llm.hpp"
#include "tkg/ontology.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace tkg {

class AnnotatorBackend {
public:
    virtual ~AnnotatorBackend() = default;
    // Returns the extracted summary, or nullopt when the text holds no
    // information relevant to the concept. Safe for concurrent calls.
    virtual std::optional<std::string> extract(const Concept& target,
                                               const std::string& subject_text) const = 0;
};

// Deterministic stand-in: a concept matches iff any of its keywords occurs
// (case-insensitive); the summary is the concatenation of the matching
// sentences in original order.
class MockKeywordAnnotator final : public AnnotatorBackend {
public:
    std::optional<std::string> extract(const Concept& target,
                                       const std::string& subject_text) const override;
};

struct AnnotationTemplate {
    std::string version = "annotate-v1";
    std::string system_text =
        "You extract concept-specific statements from text. Reply only with the "
        "extracted statements, verbatim where possible. If the text contains no "
        "information relevant to the concept, reply with the single token NONE.";
    // Placeholders: {concept_name}, {concept_description}, {subject}
    std::string user_pattern =
        "Concept: {concept_name}\n"
        "Description: {concept_description}\n"
        "\n"
        "Text:\n{subject}\n"
        "\n"
        "Extract every statement relevant to the concept.";

    std::string render_user(const Concept& target, const std::string& subject_text) const;
};

// LLM-backed annotator: one chat call per (concept, text) pair; the
// literal reply NONE means no relevance.
class LlmAnnotator final : public AnnotatorBackend {
public:
    LlmAnnotator(llm::ChatClient& client, AnnotationTemplate tmpl = {});
    std::optional<std::string> extract(const Concept& target,
                                       const std::string& subject_text) const override;

private:
    llm::ChatClient& client_;
    AnnotationTemplate template_;
};

// Builds the would-be edge without inserting it. Returns nullopt when the
// backend reports no relevance. Backend failures propagate as Error.
std::optional<Edge> annotate_chunk(const Concept& target, const ChunkNode& chunk,
                                   const AnnotatorBackend& backend);
std::optional<Edge> annotate_object(const ObjectNode& object, const Concept& target,
                                    const AnnotatorBackend& backend);

enum class AnnotationScope { chunks, objects, both };

struct FailedPair {
    std::string kind; // edge kind name
    std::string a;
    std::string b;
    std::string error;
};

struct AnnotationReport {
    std::uint64_t edges_created = 0;
    // Pairs not yielding a new edge: already annotated or no relevance found.
    std::uint64_t pairs_skipped = 0;
    std::uint64_t pairs_failed = 0;
    std::vector<FailedPair> failures;

    std::string to_json() const;
};

struct AnnotationOptions {
    AnnotationScope scope = AnnotationScope::both;
    int max_in_flight = 4;
};

// Drives annotation over every (concept, chunk) / (object, concept) pair.
// Idempotent: pairs that already carry an edge are skipped and existing
// edges are never modified. Failures are collected, never thrown.
AnnotationReport run_annotation(TripartiteGraph& g, const Ontology& ontology,
                                const AnnotatorBackend& backend,
                                const AnnotationOptions& options = {});

// JSON lines {kind, a, b, error}, one per failed pair.
void write_failed_pairs(const std::filesystem::path& path,
                        const std::vector<FailedPair>& failures);

} // namespace tkg
