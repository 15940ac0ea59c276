#include "tkg/graph.hpp"

#include "tkg/errors.hpp"
#include "tkg/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>
#include <sstream>

namespace tkg {

using nlohmann::json;

const char* node_kind_name(NodeKind k) {
    switch (k) {
        case NodeKind::object: return "object";
        case NodeKind::concept_class: return "concept_class";
        case NodeKind::concept_: return "concept";
        case NodeKind::document: return "document";
        case NodeKind::section: return "section";
        case NodeKind::chunk: return "chunk";
    }
    return "?";
}

const char* edge_kind_name(EdgeKind k) {
    switch (k) {
        case EdgeKind::object_concept: return "object_concept";
        case EdgeKind::concept_chunk: return "concept_chunk";
        case EdgeKind::class_concept: return "class_concept";
        case EdgeKind::doc_section: return "doc_section";
        case EdgeKind::section_chunk: return "section_chunk";
        case EdgeKind::chunk_next: return "chunk_next";
    }
    return "?";
}

std::optional<NodeKind> node_kind_from(const std::string& name) {
    for (NodeKind k : {NodeKind::object, NodeKind::concept_class, NodeKind::concept_,
                       NodeKind::document, NodeKind::section, NodeKind::chunk}) {
        if (name == node_kind_name(k)) return k;
    }
    return std::nullopt;
}

std::optional<EdgeKind> edge_kind_from(const std::string& name) {
    for (EdgeKind k : {EdgeKind::object_concept, EdgeKind::concept_chunk, EdgeKind::class_concept,
                       EdgeKind::doc_section, EdgeKind::section_chunk, EdgeKind::chunk_next}) {
        if (name == edge_kind_name(k)) return k;
    }
    return std::nullopt;
}

bool edge_kind_annotated(EdgeKind k) {
    return k == EdgeKind::object_concept || k == EdgeKind::concept_chunk;
}

std::string make_edge_id(EdgeKind kind, const std::string& a, const std::string& b) {
    return std::string(edge_kind_name(kind)) + "|" + a + "|" + b;
}

namespace {

// Endpoint node kinds required per edge kind.
std::pair<NodeKind, NodeKind> endpoint_kinds(EdgeKind k) {
    switch (k) {
        case EdgeKind::object_concept: return {NodeKind::object, NodeKind::concept_};
        case EdgeKind::concept_chunk: return {NodeKind::concept_, NodeKind::chunk};
        case EdgeKind::class_concept: return {NodeKind::concept_class, NodeKind::concept_};
        case EdgeKind::doc_section: return {NodeKind::document, NodeKind::section};
        case EdgeKind::section_chunk: return {NodeKind::section, NodeKind::chunk};
        case EdgeKind::chunk_next: return {NodeKind::chunk, NodeKind::chunk};
    }
    return {NodeKind::object, NodeKind::object};
}

} // namespace

std::string TripartiteGraph::upsert(ObjectNode node) {
    std::string id = node.object_id;
    objects_[id] = std::move(node);
    return id;
}

std::string TripartiteGraph::upsert(DocumentNode node) {
    std::string id = node.doc_id;
    documents_[id] = std::move(node);
    return id;
}

std::string TripartiteGraph::upsert(SectionNode node) {
    std::string id = node.section_id;
    sections_[id] = std::move(node);
    return id;
}

std::string TripartiteGraph::upsert(ChunkNode node) {
    std::string id = node.chunk_id;
    chunks_[id] = std::move(node);
    return id;
}

std::string TripartiteGraph::upsert(ConceptClassNode node) {
    std::string id = node.class_id;
    classes_[id] = std::move(node);
    return id;
}

std::string TripartiteGraph::upsert(ConceptNode node) {
    std::string id = node.concept_id;
    concepts_[id] = std::move(node);
    return id;
}

const ObjectNode* TripartiteGraph::object(const std::string& id) const {
    auto it = objects_.find(id);
    return it == objects_.end() ? nullptr : &it->second;
}

const DocumentNode* TripartiteGraph::document(const std::string& id) const {
    auto it = documents_.find(id);
    return it == documents_.end() ? nullptr : &it->second;
}

const SectionNode* TripartiteGraph::section(const std::string& id) const {
    auto it = sections_.find(id);
    return it == sections_.end() ? nullptr : &it->second;
}

const ChunkNode* TripartiteGraph::chunk(const std::string& id) const {
    auto it = chunks_.find(id);
    return it == chunks_.end() ? nullptr : &it->second;
}

const ConceptClassNode* TripartiteGraph::concept_class(const std::string& id) const {
    auto it = classes_.find(id);
    return it == classes_.end() ? nullptr : &it->second;
}

const ConceptNode* TripartiteGraph::concept_node(const std::string& id) const {
    auto it = concepts_.find(id);
    return it == concepts_.end() ? nullptr : &it->second;
}

std::optional<NodeKind> TripartiteGraph::node_kind(const std::string& id) const {
    if (objects_.count(id)) return NodeKind::object;
    if (classes_.count(id)) return NodeKind::concept_class;
    if (concepts_.count(id)) return NodeKind::concept_;
    if (documents_.count(id)) return NodeKind::document;
    if (sections_.count(id)) return NodeKind::section;
    if (chunks_.count(id)) return NodeKind::chunk;
    return std::nullopt;
}

void TripartiteGraph::set_chunk_embedding(const std::string& chunk_id,
                                          std::vector<double> embedding) {
    auto it = chunks_.find(chunk_id);
    if (it == chunks_.end()) raise(Errc::unknown_node, "chunk " + chunk_id);
    require_embedding_dim(static_cast<int>(embedding.size()));
    it->second.embedding = std::move(embedding);
}

std::string TripartiteGraph::insert_edge(EdgeKind kind, const std::string& a,
                                         const std::string& b, std::string summary) {
    auto [want_a, want_b] = endpoint_kinds(kind);
    auto ka = node_kind(a);
    auto kb = node_kind(b);
    if (!ka) raise(Errc::endpoint_missing, "endpoint \"" + a + "\" does not exist");
    if (!kb) raise(Errc::endpoint_missing, "endpoint \"" + b + "\" does not exist");
    if (*ka != want_a || *kb != want_b) {
        raise(Errc::kind_mismatch,
              std::string(edge_kind_name(kind)) + " edge requires (" + node_kind_name(want_a) +
                  ", " + node_kind_name(want_b) + ") but got (" + node_kind_name(*ka) + ", " +
                  node_kind_name(*kb) + ")");
    }
    std::string id = make_edge_id(kind, a, b);
    auto it = edges_.find(id);
    if (it != edges_.end()) return id; // existing edge untouched

    Edge e;
    e.edge_id = id;
    e.kind = kind;
    e.a = a;
    e.b = b;
    e.summary = std::move(summary);
    edges_.emplace(id, std::move(e));
    return id;
}

const Edge* TripartiteGraph::edge(const std::string& edge_id) const {
    auto it = edges_.find(edge_id);
    return it == edges_.end() ? nullptr : &it->second;
}

const Edge* TripartiteGraph::find_edge(EdgeKind kind, const std::string& a,
                                       const std::string& b) const {
    return edge(make_edge_id(kind, a, b));
}

void TripartiteGraph::set_edge_embedding(const std::string& edge_id,
                                         std::vector<double> embedding) {
    auto it = edges_.find(edge_id);
    if (it == edges_.end()) raise(Errc::unknown_node, "edge " + edge_id);
    require_embedding_dim(static_cast<int>(embedding.size()));
    it->second.embedding = std::move(embedding);
}

std::vector<std::pair<const Edge*, std::string>>
TripartiteGraph::neighbors(const std::string& node_id, EdgeKind kind) const {
    if (!has_node(node_id)) raise(Errc::unknown_node, node_id);
    std::vector<std::pair<const Edge*, std::string>> out;
    for (const auto& [id, e] : edges_) {
        if (e.kind != kind) continue;
        if (e.a == node_id) out.emplace_back(&e, e.b);
        else if (e.b == node_id) out.emplace_back(&e, e.a);
    }
    std::sort(out.begin(), out.end(),
              [](const auto& x, const auto& y) { return x.second < y.second; });
    return out;
}

void TripartiteGraph::require_embedding_dim(int dim) {
    if (dim <= 0) raise(Errc::dimension_mismatch, "embedding dimension must be positive");
    if (embedding_dim_ == 0) {
        embedding_dim_ = dim;
    } else if (embedding_dim_ != dim) {
        raise(Errc::dimension_mismatch, "graph dimension is " + std::to_string(embedding_dim_) +
                                            " but got " + std::to_string(dim));
    }
}

std::size_t TripartiteGraph::node_count() const {
    return objects_.size() + documents_.size() + sections_.size() + chunks_.size() +
           classes_.size() + concepts_.size();
}

std::vector<GraphViolation> TripartiteGraph::validate() const {
    std::vector<GraphViolation> out;
    auto complain = [&](std::string msg) { out.push_back({std::move(msg)}); };

    for (const auto& [id, e] : edges_) {
        auto [want_a, want_b] = endpoint_kinds(e.kind);
        auto ka = node_kind(e.a);
        auto kb = node_kind(e.b);
        if (!ka || *ka != want_a || !kb || *kb != want_b) {
            complain("edge " + id + " has wrong endpoint kinds");
        }
        if (edge_kind_annotated(e.kind) && e.summary.empty()) {
            complain("annotated edge " + id + " has empty summary");
        }
        if (e.embedding && embedding_dim_ != 0 &&
            static_cast<int>(e.embedding->size()) != embedding_dim_) {
            complain("edge " + id + " embedding dimension differs from header");
        }
    }

    for (const auto& [id, doc] : documents_) {
        for (const auto& sid : doc.section_ids) {
            if (!sections_.count(sid)) complain("document " + id + " references missing section " + sid);
        }
    }
    for (const auto& [id, sec] : sections_) {
        if (!documents_.count(sec.doc_id)) complain("section " + id + " references missing document");
        for (const auto& cid : sec.chunk_ids) {
            if (!chunks_.count(cid)) complain("section " + id + " references missing chunk " + cid);
        }
    }
    for (const auto& [id, ch] : chunks_) {
        if (!sections_.count(ch.section_id)) complain("chunk " + id + " references missing section");
        if (ch.text.empty()) complain("chunk " + id + " has empty text");
        if (ch.next_chunk_id && !chunks_.count(*ch.next_chunk_id)) {
            complain("chunk " + id + " successor does not exist");
        }
    }
    for (const auto& [id, c] : concepts_) {
        if (!classes_.count(c.class_id)) complain("concept " + id + " references missing class");
    }
    for (const auto& [id, obj] : objects_) {
        if (obj.text.empty()) complain("object " + id + " has empty text");
    }

    // Successor chains must be acyclic and visit each chunk at most once.
    std::map<std::string, int> pred_count;
    for (const auto& [id, ch] : chunks_) {
        if (ch.next_chunk_id) ++pred_count[*ch.next_chunk_id];
    }
    for (const auto& [cid, n] : pred_count) {
        if (n > 1) complain("chunk " + cid + " has " + std::to_string(n) + " predecessors");
    }
    std::set<std::string> visited;
    for (const auto& [id, ch] : chunks_) {
        if (pred_count.count(id)) continue; // not a chain head
        std::string cur = id;
        std::set<std::string> on_path;
        while (true) {
            if (!on_path.insert(cur).second) {
                complain("successor cycle through chunk " + cur);
                break;
            }
            visited.insert(cur);
            const ChunkNode* c = chunk(cur);
            if (!c || !c->next_chunk_id) break;
            cur = *c->next_chunk_id;
        }
    }
    if (visited.size() != chunks_.size() && pred_count.size() == chunks_.size() &&
        !chunks_.empty()) {
        complain("successor links form a closed cycle");
    }

    return out;
}

// --- persistence --------------------------------------------------------

namespace {

json vec_to_json(const std::vector<double>& v) {
    return json(v);
}

std::vector<double> vec_from_json(const json& j) {
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& x : j) out.push_back(x.get<double>());
    return out;
}

} // namespace

std::string graph_to_jsonl(const TripartiteGraph& g) {
    std::ostringstream out;
    json header;
    header["t"] = "header";
    header["format"] = TripartiteGraph::kFormatVersion;
    header["embedding_dim"] = g.embedding_dim();
    out << header.dump() << "\n";

    for (const auto& [id, n] : g.documents()) {
        json j{{"t", "document"}, {"id", n.doc_id}, {"title", n.title},
               {"source_uri", n.source_uri}, {"sections", n.section_ids}};
        out << j.dump() << "\n";
    }
    for (const auto& [id, n] : g.sections()) {
        json j{{"t", "section"}, {"id", n.section_id}, {"doc", n.doc_id},
               {"heading", n.heading}, {"ordinal", n.ordinal}, {"chunks", n.chunk_ids}};
        out << j.dump() << "\n";
    }
    for (const auto& [id, n] : g.chunks()) {
        json j{{"t", "chunk"}, {"id", n.chunk_id}, {"section", n.section_id},
               {"text", n.text}, {"ordinal", n.ordinal}};
        if (n.next_chunk_id) j["next"] = *n.next_chunk_id;
        if (n.embedding) j["embedding"] = vec_to_json(*n.embedding);
        out << j.dump() << "\n";
    }
    for (const auto& [id, n] : g.concept_classes()) {
        json j{{"t", "concept_class"}, {"id", n.class_id}, {"name", n.name},
               {"ordinal", n.ordinal}, {"concepts", n.concept_ids}};
        out << j.dump() << "\n";
    }
    for (const auto& [id, n] : g.concepts()) {
        json j{{"t", "concept"}, {"id", n.concept_id}, {"class", n.class_id},
               {"name", n.name}, {"ordinal", n.ordinal}};
        if (n.description) j["description"] = *n.description;
        out << j.dump() << "\n";
    }
    for (const auto& [id, n] : g.objects()) {
        json j{{"t", "object"}, {"id", n.object_id}, {"title", n.title}, {"text", n.text}};
        out << j.dump() << "\n";
    }
    for (const auto& [id, e] : g.edges()) {
        json j{{"t", "edge"}, {"kind", edge_kind_name(e.kind)}, {"a", e.a}, {"b", e.b}};
        if (!e.summary.empty()) j["summary"] = e.summary;
        if (e.embedding) j["embedding"] = vec_to_json(*e.embedding);
        out << j.dump() << "\n";
    }
    return out.str();
}

TripartiteGraph graph_from_jsonl(const std::string& content) {
    TripartiteGraph g;
    std::istringstream in(content);
    std::string line;
    std::size_t lineno = 0;
    bool saw_header = false;
    int header_dim = 0;

    // Edges are buffered so node records may appear in any order.
    struct PendingEdge {
        std::size_t lineno;
        EdgeKind kind;
        std::string a, b, summary;
        std::optional<std::vector<double>> embedding;
    };
    std::vector<PendingEdge> pending;

    while (std::getline(in, line)) {
        ++lineno;
        if (util::trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            raise(Errc::corrupt_record, "line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!j.is_object() || !j.contains("t") || !j["t"].is_string()) {
            raise(Errc::corrupt_record, "line " + std::to_string(lineno) + ": missing record type");
        }
        std::string t = j["t"].get<std::string>();
        try {
            if (lineno == 1) {
                if (t != "header") {
                    raise(Errc::corrupt_record, "line 1: expected header record");
                }
                int format = j.at("format").get<int>();
                if (format != TripartiteGraph::kFormatVersion) {
                    raise(Errc::format_version_mismatch,
                          "file format " + std::to_string(format) + ", expected " +
                              std::to_string(TripartiteGraph::kFormatVersion));
                }
                header_dim = j.value("embedding_dim", 0);
                saw_header = true;
                continue;
            }
            if (t == "header") {
                raise(Errc::corrupt_record, "line " + std::to_string(lineno) + ": duplicate header");
            } else if (t == "document") {
                DocumentNode n;
                n.doc_id = j.at("id").get<std::string>();
                n.title = j.value("title", "");
                n.source_uri = j.value("source_uri", "");
                n.section_ids = j.value("sections", std::vector<std::string>{});
                g.upsert(std::move(n));
            } else if (t == "section") {
                SectionNode n;
                n.section_id = j.at("id").get<std::string>();
                n.doc_id = j.at("doc").get<std::string>();
                n.heading = j.value("heading", "");
                n.ordinal = j.value("ordinal", 0);
                n.chunk_ids = j.value("chunks", std::vector<std::string>{});
                g.upsert(std::move(n));
            } else if (t == "chunk") {
                ChunkNode n;
                n.chunk_id = j.at("id").get<std::string>();
                n.section_id = j.at("section").get<std::string>();
                n.text = j.at("text").get<std::string>();
                n.ordinal = j.value("ordinal", 0);
                if (j.contains("next")) n.next_chunk_id = j["next"].get<std::string>();
                if (j.contains("embedding")) n.embedding = vec_from_json(j["embedding"]);
                g.upsert(std::move(n));
            } else if (t == "concept_class") {
                ConceptClassNode n;
                n.class_id = j.at("id").get<std::string>();
                n.name = j.at("name").get<std::string>();
                n.ordinal = j.value("ordinal", 0);
                n.concept_ids = j.value("concepts", std::vector<std::string>{});
                g.upsert(std::move(n));
            } else if (t == "concept") {
                ConceptNode n;
                n.concept_id = j.at("id").get<std::string>();
                n.class_id = j.at("class").get<std::string>();
                n.name = j.at("name").get<std::string>();
                n.ordinal = j.value("ordinal", 0);
                if (j.contains("description")) n.description = j["description"].get<std::string>();
                g.upsert(std::move(n));
            } else if (t == "object") {
                ObjectNode n;
                n.object_id = j.at("id").get<std::string>();
                n.title = j.value("title", "");
                n.text = j.at("text").get<std::string>();
                g.upsert(std::move(n));
            } else if (t == "edge") {
                PendingEdge pe;
                pe.lineno = lineno;
                auto kind = edge_kind_from(j.at("kind").get<std::string>());
                if (!kind) {
                    raise(Errc::corrupt_record,
                          "line " + std::to_string(lineno) + ": unknown edge kind");
                }
                pe.kind = *kind;
                pe.a = j.at("a").get<std::string>();
                pe.b = j.at("b").get<std::string>();
                pe.summary = j.value("summary", "");
                if (j.contains("embedding")) pe.embedding = vec_from_json(j["embedding"]);
                pending.push_back(std::move(pe));
            } else {
                raise(Errc::corrupt_record,
                      "line " + std::to_string(lineno) + ": unknown node kind \"" + t + "\"");
            }
        } catch (const json::exception& e) {
            raise(Errc::corrupt_record, "line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!saw_header) {
        raise(Errc::corrupt_record, "line 1: expected header record");
    }

    for (auto& pe : pending) {
        std::string id;
        try {
            id = g.insert_edge(pe.kind, pe.a, pe.b, std::move(pe.summary));
        } catch (const Error& e) {
            raise(Errc::corrupt_record, "line " + std::to_string(pe.lineno) + ": " + e.what());
        }
        if (pe.embedding) g.set_edge_embedding(id, std::move(*pe.embedding));
    }
    if (header_dim != 0) g.require_embedding_dim(header_dim);
    return g;
}

void save_graph(const TripartiteGraph& g, const std::filesystem::path& path) {
    util::write_file_atomic(path, graph_to_jsonl(g));
}

TripartiteGraph load_graph(const std::filesystem::path& path) {
    return graph_from_jsonl(util::read_file(path));
}

bool structural_equal(const TripartiteGraph& a, const TripartiteGraph& b) {
    auto eq_doc = [](const DocumentNode& x, const DocumentNode& y) {
        return x.doc_id == y.doc_id && x.title == y.title && x.source_uri == y.source_uri &&
               x.section_ids == y.section_ids;
    };
    auto eq_sec = [](const SectionNode& x, const SectionNode& y) {
        return x.section_id == y.section_id && x.doc_id == y.doc_id && x.heading == y.heading &&
               x.ordinal == y.ordinal && x.chunk_ids == y.chunk_ids;
    };
    auto eq_chunk = [](const ChunkNode& x, const ChunkNode& y) {
        return x.chunk_id == y.chunk_id && x.section_id == y.section_id && x.text == y.text &&
               x.ordinal == y.ordinal && x.next_chunk_id == y.next_chunk_id &&
               x.embedding == y.embedding;
    };
    auto eq_class = [](const ConceptClassNode& x, const ConceptClassNode& y) {
        return x.class_id == y.class_id && x.name == y.name && x.ordinal == y.ordinal &&
               x.concept_ids == y.concept_ids;
    };
    auto eq_concept = [](const ConceptNode& x, const ConceptNode& y) {
        return x.concept_id == y.concept_id && x.class_id == y.class_id && x.name == y.name &&
               x.ordinal == y.ordinal && x.description == y.description;
    };
    auto eq_obj = [](const ObjectNode& x, const ObjectNode& y) {
        return x.object_id == y.object_id && x.title == y.title && x.text == y.text;
    };
    auto eq_edge = [](const Edge& x, const Edge& y) {
        return x.kind == y.kind && x.a == y.a && x.b == y.b && x.summary == y.summary &&
               x.embedding == y.embedding;
    };

    auto map_equal = [](const auto& ma, const auto& mb, auto eq) {
        if (ma.size() != mb.size()) return false;
        auto ib = mb.begin();
        for (auto ia = ma.begin(); ia != ma.end(); ++ia, ++ib) {
            if (ia->first != ib->first || !eq(ia->second, ib->second)) return false;
        }
        return true;
    };

    return a.embedding_dim() == b.embedding_dim() &&
           map_equal(a.documents(), b.documents(), eq_doc) &&
           map_equal(a.sections(), b.sections(), eq_sec) &&
           map_equal(a.chunks(), b.chunks(), eq_chunk) &&
           map_equal(a.concept_classes(), b.concept_classes(), eq_class) &&
           map_equal(a.concepts(), b.concepts(), eq_concept) &&
           map_equal(a.objects(), b.objects(), eq_obj) &&
           map_equal(a.edges(), b.edges(), eq_edge);
}

} // namespace tkg
