#pragma once
// Plugin ontology: concept classes and concepts, loaded from JSON.
//
// Declaration order is significant — it drives the cross-concept ordering
// of assembled prompts — so every container here preserves file order.

#include <optional>
#include <string>
#include <vector>

namespace tkg {

struct Concept {
    std::string concept_id; // "<class-slug>/<concept-slug>"
    std::string class_id;
    std::string name;
    std::optional<std::string> description;
    // Consulted only by the mock annotator; LLM-backed annotation ignores them.
    std::vector<std::string> keywords;
};

struct ConceptClass {
    std::string class_id; // slugified name
    std::string name;
    std::vector<Concept> concepts; // declaration order
};

struct Ontology {
    std::string version;
    std::vector<ConceptClass> classes; // declaration order

    std::size_t concept_count() const;
    const Concept* find_concept(const std::string& concept_id) const;
    // All concepts in declaration order (class order, then in-class order).
    std::vector<const Concept*> all_concepts() const;
};

struct OntologyViolation {
    enum class Kind { duplicate_concept, empty_class, duplicate_class };
    Kind kind;
    std::string detail;
};

// Parses the JSON ontology format:
//   {"version": str, "classes": [{"name": str,
//     "concepts": [{"name": str, "description"?: str, "keywords"?: [str]}]}]}
// Throws Error(syntax_error) with a byte position for malformed JSON,
// Error(duplicate_concept) / Error(empty_class) for invariant breaks.
Ontology parse_ontology(const std::string& contents);

// Invariant sweep; an empty result means the ontology is valid.
std::vector<OntologyViolation> validate_ontology(const Ontology& o);

// Inverse of parse_ontology on valid ontologies (round-trip identity).
std::string serialize_ontology(const Ontology& o);

} // namespace tkg
