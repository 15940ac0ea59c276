#pragma once
// Shared fixtures for the unit tests.

#include "tkg/graph.hpp"
#include "tkg/scoring.hpp"

#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace tkg::testing {

// Embedder with a fixed text -> vector table; unknown text is an error so
// fixture gaps surface immediately.
class FixedEmbedder final : public EmbedderBackend {
public:
    explicit FixedEmbedder(std::map<std::string, std::vector<double>> table)
        : table_(std::move(table)) {}

    std::vector<double> embed(const std::string& text) override {
        auto it = table_.find(text);
        if (it == table_.end()) throw std::runtime_error("FixedEmbedder: unmapped text: " + text);
        return it->second;
    }

    int dimension() const override {
        return table_.empty() ? 0 : static_cast<int>(table_.begin()->second.size());
    }

private:
    std::map<std::string, std::vector<double>> table_;
};

struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        static std::mt19937_64 rng(std::random_device{}());
        path = std::filesystem::temp_directory_path() /
               ("tkg-test-" + tag + "-" + std::to_string(rng()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

// Document -> single section -> chunks, with structure edges and the
// successor chain, built without going through ingestion.
inline void add_document(TripartiteGraph& g, const std::string& doc_id,
                         const std::string& heading, const std::vector<std::string>& chunk_texts) {
    DocumentNode doc;
    doc.doc_id = doc_id;
    doc.title = doc_id;
    std::string section_id = doc_id + ":s0";
    doc.section_ids = {section_id};
    g.upsert(std::move(doc));

    SectionNode sec;
    sec.section_id = section_id;
    sec.doc_id = doc_id;
    sec.heading = heading;
    sec.ordinal = 0;
    for (std::size_t i = 0; i < chunk_texts.size(); ++i) {
        sec.chunk_ids.push_back(section_id + ":c" + std::to_string(i));
    }
    auto chunk_ids = sec.chunk_ids;
    g.upsert(std::move(sec));

    for (std::size_t i = 0; i < chunk_texts.size(); ++i) {
        ChunkNode ch;
        ch.chunk_id = chunk_ids[i];
        ch.section_id = section_id;
        ch.text = chunk_texts[i];
        ch.ordinal = static_cast<int>(i);
        if (i + 1 < chunk_ids.size()) ch.next_chunk_id = chunk_ids[i + 1];
        g.upsert(std::move(ch));
    }
    g.insert_edge(EdgeKind::doc_section, doc_id, section_id);
    for (std::size_t i = 0; i < chunk_ids.size(); ++i) {
        g.insert_edge(EdgeKind::section_chunk, section_id, chunk_ids[i]);
        if (i + 1 < chunk_ids.size()) {
            g.insert_edge(EdgeKind::chunk_next, chunk_ids[i], chunk_ids[i + 1]);
        }
    }
}

inline void add_concept(TripartiteGraph& g, const std::string& class_id,
                        const std::string& class_name, const std::string& concept_id,
                        const std::string& concept_name) {
    if (!g.concept_class(class_id)) {
        ConceptClassNode cls;
        cls.class_id = class_id;
        cls.name = class_name;
        g.upsert(std::move(cls));
    }
    ConceptNode c;
    c.concept_id = concept_id;
    c.class_id = class_id;
    c.name = concept_name;
    g.upsert(std::move(c));
    g.insert_edge(EdgeKind::class_concept, class_id, concept_id);
}

inline void add_object(TripartiteGraph& g, const std::string& id, const std::string& title,
                       const std::string& text) {
    ObjectNode o;
    o.object_id = id;
    o.title = title;
    o.text = text;
    g.upsert(std::move(o));
}

// Three patients sharing one concept over two chunks. The edge summaries
// are mapped to vectors whose pairwise cosines give the score multiset
// {0.1, 0.2, 0.3, 0.4, 0.5, 0.7}; the 0.7 belongs to
// (barbara-schmidt, blood-pressure, chunk II).
struct PatientFixture {
    TripartiteGraph graph;
    std::string concept_id = "symptoms/blood-pressure";
    std::string chunk_1 = "guide-x:s0:c0";
    std::string chunk_2 = "guide-x:s0:c1";
    std::vector<std::string> objects = {"barbara-schmidt", "oskar-lehm", "peter-mueller"};
    std::map<std::string, std::vector<double>> vectors;

    FixedEmbedder embedder() const { return FixedEmbedder(vectors); }
};

inline PatientFixture make_patient_fixture() {
    PatientFixture f;
    TripartiteGraph& g = f.graph;

    add_document(g, "guide-x", "Blood pressure management",
                 {"Chunk one discusses target values.", "Chunk two discusses home readings."});
    add_concept(g, "symptoms", "symptoms", f.concept_id, "blood pressure");
    add_object(g, "peter-mueller", "Peter Mueller", "Peter reports headaches.");
    add_object(g, "barbara-schmidt", "Barbara Schmidt",
               "Barbara measures at home blood pressure values of 170 - 180/90 mmHg.");
    add_object(g, "oskar-lehm", "Oskar Lehm", "Oskar brings a pressure diary.");

    auto add_edge = [&](EdgeKind kind, const std::string& a, const std::string& b,
                        const std::string& summary, std::vector<double> vec) {
        std::string id = g.insert_edge(kind, a, b, summary);
        f.vectors[summary] = vec;
        g.set_edge_embedding(id, std::move(vec));
    };

    // cos(u, e1) = u[0], cos(u, e2) = u[1]; third component fills the norm.
    auto filler = [](double x, double y) { return std::sqrt(1.0 - x * x - y * y); };
    add_edge(EdgeKind::concept_chunk, f.concept_id, f.chunk_1, "summary chunk I",
             {1.0, 0.0, 0.0});
    add_edge(EdgeKind::concept_chunk, f.concept_id, f.chunk_2, "summary chunk II",
             {0.0, 1.0, 0.0});
    add_edge(EdgeKind::object_concept, "peter-mueller", f.concept_id, "peter pressure finding",
             {0.1, 0.2, filler(0.1, 0.2)});
    add_edge(EdgeKind::object_concept, "barbara-schmidt", f.concept_id,
             "barbara pressure finding", {0.3, 0.7, filler(0.3, 0.7)});
    add_edge(EdgeKind::object_concept, "oskar-lehm", f.concept_id, "oskar pressure finding",
             {0.4, 0.5, filler(0.4, 0.5)});
    return f;
}

} // namespace tkg::testing
