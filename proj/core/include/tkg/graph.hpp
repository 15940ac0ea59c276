#pragma once
// Tripartite property-graph store.
//
// Node kinds: object, concept_class, concept, document, section, chunk.
// Edge kinds: object_concept and concept_chunk carry annotation payloads
// (summary text plus optional embedding); class_concept, doc_section,
// section_chunk and chunk_next are structure edges. Objects and chunks are
// never directly connected.
//
// Concurrency contract: many concurrent readers or one writer. Batch
// drivers (annotation, embedding) compute in parallel and funnel all
// mutations through a single thread.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tkg {

enum class NodeKind { object, concept_class, concept_, document, section, chunk };
enum class EdgeKind { object_concept, concept_chunk, class_concept, doc_section, section_chunk, chunk_next };

const char* node_kind_name(NodeKind k);
const char* edge_kind_name(EdgeKind k);
std::optional<NodeKind> node_kind_from(const std::string& name);
std::optional<EdgeKind> edge_kind_from(const std::string& name);

// True for the two annotated kinds (summary-carrying edges).
bool edge_kind_annotated(EdgeKind k);

struct DocumentNode {
    std::string doc_id;
    std::string title;
    std::string source_uri;
    std::vector<std::string> section_ids; // source order
};

struct SectionNode {
    std::string section_id;
    std::string doc_id;
    std::string heading;
    int ordinal = 0;
    std::vector<std::string> chunk_ids; // reading order
};

struct ChunkNode {
    std::string chunk_id;
    std::string section_id;
    std::string text;
    int ordinal = 0;
    std::optional<std::string> next_chunk_id;
    // Raw-text embedding used by the naive baseline; annotated-edge
    // embeddings live on the edges instead.
    std::optional<std::vector<double>> embedding;
};

struct ObjectNode {
    std::string object_id;
    std::string title;
    std::string text;
};

struct ConceptClassNode {
    std::string class_id;
    std::string name;
    int ordinal = 0; // ontology declaration index
    std::vector<std::string> concept_ids;
};

struct ConceptNode {
    std::string concept_id;
    std::string class_id;
    std::string name;
    int ordinal = 0; // declaration index within the class
    std::optional<std::string> description;
};

struct Edge {
    std::string edge_id; // "<kind>|<a>|<b>", assigned on insert
    EdgeKind kind = EdgeKind::object_concept;
    std::string a;
    std::string b;
    std::string summary;                          // annotated kinds only
    std::optional<std::vector<double>> embedding; // annotated kinds only
};

struct GraphViolation {
    std::string detail;
};

class TripartiteGraph {
public:
    static constexpr int kFormatVersion = 1;

    // --- nodes ---------------------------------------------------------
    std::string upsert(ObjectNode node);
    std::string upsert(DocumentNode node);
    std::string upsert(SectionNode node);
    std::string upsert(ChunkNode node);
    std::string upsert(ConceptClassNode node);
    std::string upsert(ConceptNode node);

    const ObjectNode* object(const std::string& id) const;
    const DocumentNode* document(const std::string& id) const;
    const SectionNode* section(const std::string& id) const;
    const ChunkNode* chunk(const std::string& id) const;
    const ConceptClassNode* concept_class(const std::string& id) const;
    const ConceptNode* concept_node(const std::string& id) const;

    std::optional<NodeKind> node_kind(const std::string& id) const;
    bool has_node(const std::string& id) const { return node_kind(id).has_value(); }

    const std::map<std::string, ObjectNode>& objects() const { return objects_; }
    const std::map<std::string, DocumentNode>& documents() const { return documents_; }
    const std::map<std::string, SectionNode>& sections() const { return sections_; }
    const std::map<std::string, ChunkNode>& chunks() const { return chunks_; }
    const std::map<std::string, ConceptClassNode>& concept_classes() const { return classes_; }
    const std::map<std::string, ConceptNode>& concepts() const { return concepts_; }

    void set_chunk_embedding(const std::string& chunk_id, std::vector<double> embedding);

    // --- edges ---------------------------------------------------------
    // Endpoint kinds must match the edge kind (object_concept connects an
    // object to a concept, and so on). A duplicate insert returns the
    // existing edge id and leaves the stored edge untouched.
    // Throws Error(endpoint_missing) or Error(kind_mismatch).
    std::string insert_edge(EdgeKind kind, const std::string& a, const std::string& b,
                            std::string summary = "");

    const Edge* edge(const std::string& edge_id) const;
    const Edge* find_edge(EdgeKind kind, const std::string& a, const std::string& b) const;
    const std::map<std::string, Edge>& edges() const { return edges_; }

    void set_edge_embedding(const std::string& edge_id, std::vector<double> embedding);

    // Edges of `kind` incident to `node_id` from either side, paired with
    // the id of the opposite endpoint, ordered by that neighbor id.
    // Throws Error(unknown_node).
    std::vector<std::pair<const Edge*, std::string>> neighbors(const std::string& node_id,
                                                               EdgeKind kind) const;

    // --- embeddings ----------------------------------------------------
    int embedding_dim() const { return embedding_dim_; }
    // First embedding fixes the dimension; later mismatches throw.
    void require_embedding_dim(int dim);

    // --- maintenance ---------------------------------------------------
    // Full schema sweep; empty result means every invariant holds.
    std::vector<GraphViolation> validate() const;

    std::size_t node_count() const;
    std::size_t edge_count() const { return edges_.size(); }

private:
    std::map<std::string, ObjectNode> objects_;
    std::map<std::string, DocumentNode> documents_;
    std::map<std::string, SectionNode> sections_;
    std::map<std::string, ChunkNode> chunks_;
    std::map<std::string, ConceptClassNode> classes_;
    std::map<std::string, ConceptNode> concepts_;
    std::map<std::string, Edge> edges_;
    int embedding_dim_ = 0; // 0 = not yet fixed
};

// JSON-lines persistence. First line is a header record carrying the
// format version and embedding dimension; node and edge records follow in
// sorted order, so saving is deterministic.
void save_graph(const TripartiteGraph& g, const std::filesystem::path& path);
TripartiteGraph load_graph(const std::filesystem::path& path);

std::string graph_to_jsonl(const TripartiteGraph& g);
TripartiteGraph graph_from_jsonl(const std::string& content);

// Field-wise equality, independent of insertion order.
bool structural_equal(const TripartiteGraph& a, const TripartiteGraph& b);

std::string make_edge_id(EdgeKind kind, const std::string& a, const std::string& b);

} // namespace tkg
