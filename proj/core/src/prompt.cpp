#include "tkg/prompt.hpp"

#include "tkg/corpus.hpp"
#include "tkg/errors.hpp"
#include "tkg/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <map>
#include <sstream>

namespace tkg {

using nlohmann::json;

std::string QueryTemplate::render(const std::string& object_title) const {
    std::string out = text;
    std::size_t pos = 0;
    while ((pos = out.find("{object_title}", pos)) != std::string::npos) {
        out.replace(pos, 14, object_title);
        pos += object_title.size();
    }
    return out;
}

std::size_t HeuristicTokenCounter::count(const std::string& text) const {
    return (text.size() + 3) / 4;
}

std::size_t count_tokens(const std::string& text, const TokenCounterBackend& counter) {
    return counter.count(text);
}

namespace {

Provenance provenance_for(const TripartiteGraph& g, const std::string& chunk_id) {
    Provenance p;
    p.chunk_id = chunk_id;
    const ChunkNode* chunk = g.chunk(chunk_id);
    if (!chunk) return p;
    const SectionNode* section = g.section(chunk->section_id);
    if (!section) return p;
    p.heading = section->heading;
    p.doc_id = section->doc_id;
    return p;
}

} // namespace

PromptPlan assemble_prompt(const std::string& object_id, const TripartiteGraph& g,
                           const ClassificationGraph& classification,
                           const QueryTemplate& query_template, const Ontology& ontology,
                           const TokenCounterBackend& counter) {
    const ObjectNode* object = g.object(object_id);
    if (!object) raise(Errc::unknown_object, object_id);
    if (classification.object_id != object_id) {
        raise(Errc::unclassified_object,
              "classification belongs to \"" + classification.object_id + "\", not \"" +
                  object_id + "\"");
    }

    PromptPlan plan;
    plan.object_id = object_id;

    PromptBlock query;
    query.kind = PromptBlock::Kind::query;
    query.text = query_template.render(object->title);
    plan.blocks.push_back(std::move(query));

    // Selected chunks grouped per concept.
    std::map<std::string, std::vector<std::string>> selected_by_concept;
    for (const auto& pair : selected_pairs(classification)) {
        selected_by_concept[pair.concept_id].push_back(pair.chunk_id);
    }

    // Concepts the object is annotated with, in ontology declaration order.
    for (const Concept* c : ontology.all_concepts()) {
        const Edge* oc = g.find_edge(EdgeKind::object_concept, object_id, c->concept_id);
        if (!oc) continue;

        PromptBlock finding;
        finding.kind = PromptBlock::Kind::object_concept_summary;
        finding.concept_id = c->concept_id;
        finding.text = oc->summary;
        plan.blocks.push_back(std::move(finding));

        auto sel = selected_by_concept.find(c->concept_id);
        if (sel == selected_by_concept.end()) continue;
        for (const auto& chunk_id : document_order(g, sel->second)) {
            const Edge* ct = g.find_edge(EdgeKind::concept_chunk, c->concept_id, chunk_id);
            if (!ct) raise(Errc::unknown_concept,
                           "selected pair without edge: " + c->concept_id + " / " + chunk_id);
            PromptBlock evidence;
            evidence.kind = PromptBlock::Kind::concept_chunk_summary;
            evidence.concept_id = c->concept_id;
            evidence.text = ct->summary;
            evidence.provenance = provenance_for(g, chunk_id);
            plan.blocks.push_back(std::move(evidence));
        }
        selected_by_concept.erase(sel);
    }

    // Every selected concept must have been covered by the ontology sweep.
    if (!selected_by_concept.empty()) {
        raise(Errc::unknown_concept,
              "classification references concept \"" + selected_by_concept.begin()->first +
                  "\" absent from the ontology");
    }

    plan.token_count = counter.count(render(plan));
    return plan;
}

std::string render(const PromptPlan& plan) {
    std::ostringstream out;
    bool first = true;
    for (const auto& block : plan.blocks) {
        if (!first) out << "\n";
        first = false;
        switch (block.kind) {
            case PromptBlock::Kind::query:
                out << "[query]\n";
                break;
            case PromptBlock::Kind::object_concept_summary:
                out << "[finding " << block.concept_id << "]\n";
                break;
            case PromptBlock::Kind::concept_chunk_summary:
                out << "[evidence " << block.concept_id << "]\n";
                break;
        }
        out << block.text << "\n";
        if (block.provenance) {
            out << "[" << block.provenance->doc_id << " § " << block.provenance->heading
                << " / " << block.provenance->chunk_id << "]\n";
        }
    }
    return out.str();
}

std::string plan_to_json(const PromptPlan& plan) {
    json blocks = json::array();
    for (const auto& b : plan.blocks) {
        json jb;
        switch (b.kind) {
            case PromptBlock::Kind::query: jb["kind"] = "query"; break;
            case PromptBlock::Kind::object_concept_summary:
                jb["kind"] = "object_concept_summary";
                break;
            case PromptBlock::Kind::concept_chunk_summary:
                jb["kind"] = "concept_chunk_summary";
                break;
        }
        if (!b.concept_id.empty()) jb["concept"] = b.concept_id;
        jb["text"] = b.text;
        if (b.provenance) {
            jb["provenance"] = json{{"doc", b.provenance->doc_id},
                                    {"heading", b.provenance->heading},
                                    {"chunk", b.provenance->chunk_id}};
        }
        blocks.push_back(std::move(jb));
    }
    json doc{{"object_id", plan.object_id},
             {"token_count", plan.token_count},
             {"blocks", blocks}};
    return doc.dump(2) + "\n";
}

void write_plan_json(const std::filesystem::path& path, const PromptPlan& plan) {
    util::write_file_atomic(path, plan_to_json(plan));
}

} // namespace tkg
