#include "tkg/annotate.hpp"

#include "tkg/errors.hpp"
#include "tkg/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace tkg {

using nlohmann::json;

std::optional<std::string> MockKeywordAnnotator::extract(const Concept& target,
                                                         const std::string& subject_text) const {
    if (target.keywords.empty()) return std::nullopt;
    std::vector<std::string> sentences = util::split_sentences(subject_text);
    std::string summary;
    for (const auto& sentence : sentences) {
        bool hit = std::any_of(target.keywords.begin(), target.keywords.end(),
                               [&](const std::string& kw) {
                                   return util::contains_ci(sentence, kw);
                               });
        if (hit) {
            if (!summary.empty()) summary += ' ';
            summary += sentence;
        }
    }
    if (summary.empty()) return std::nullopt;
    return summary;
}

namespace {

void replace_all(std::string& s, std::string_view what, std::string_view with) {
    std::size_t pos = 0;
    while ((pos = s.find(what, pos)) != std::string::npos) {
        s.replace(pos, what.size(), with);
        pos += with.size();
    }
}

} // namespace

std::string AnnotationTemplate::render_user(const Concept& target,
                                            const std::string& subject_text) const {
    std::string out = user_pattern;
    replace_all(out, "{concept_name}", target.name);
    replace_all(out, "{concept_description}", target.description.value_or(""));
    replace_all(out, "{subject}", subject_text);
    return out;
}

LlmAnnotator::LlmAnnotator(llm::ChatClient& client, AnnotationTemplate tmpl)
    : client_(client), template_(std::move(tmpl)) {}

std::optional<std::string> LlmAnnotator::extract(const Concept& target,
                                                 const std::string& subject_text) const {
    std::string reply = client_.complete(template_.system_text,
                                         template_.render_user(target, subject_text));
    std::string trimmed = util::trim(reply);
    if (trimmed.empty()) {
        raise(Errc::backend_malformed_reply, "empty reply for concept " + target.concept_id);
    }
    if (trimmed == "NONE") return std::nullopt;
    return trimmed;
}

std::optional<Edge> annotate_chunk(const Concept& target, const ChunkNode& chunk,
                                   const AnnotatorBackend& backend) {
    auto summary = backend.extract(target, chunk.text);
    if (!summary) return std::nullopt;
    Edge e;
    e.kind = EdgeKind::concept_chunk;
    e.a = target.concept_id;
    e.b = chunk.chunk_id;
    e.edge_id = make_edge_id(e.kind, e.a, e.b);
    e.summary = std::move(*summary);
    return e;
}

std::optional<Edge> annotate_object(const ObjectNode& object, const Concept& target,
                                    const AnnotatorBackend& backend) {
    auto summary = backend.extract(target, object.text);
    if (!summary) return std::nullopt;
    Edge e;
    e.kind = EdgeKind::object_concept;
    e.a = object.object_id;
    e.b = target.concept_id;
    e.edge_id = make_edge_id(e.kind, e.a, e.b);
    e.summary = std::move(*summary);
    return e;
}

AnnotationReport run_annotation(TripartiteGraph& g, const Ontology& ontology,
                                const AnnotatorBackend& backend,
                                const AnnotationOptions& options) {
    struct Pair {
        EdgeKind kind;
        const Concept* target;
        std::string a;
        std::string b;
        const std::string* subject;
    };

    std::vector<Pair> pairs;
    std::vector<const Concept*> concepts = ontology.all_concepts();

    if (options.scope != AnnotationScope::objects) {
        for (const Concept* c : concepts) {
            for (const auto& [chunk_id, chunk] : g.chunks()) {
                pairs.push_back(
                    {EdgeKind::concept_chunk, c, c->concept_id, chunk_id, &chunk.text});
            }
        }
    }
    if (options.scope != AnnotationScope::chunks) {
        for (const Concept* c : concepts) {
            for (const auto& [object_id, object] : g.objects()) {
                pairs.push_back(
                    {EdgeKind::object_concept, c, object_id, c->concept_id, &object.text});
            }
        }
    }

    AnnotationReport report;

    struct Outcome {
        enum class State { skipped, summary, none, failed } state = State::skipped;
        std::string text; // summary or error message
    };
    std::vector<Outcome> outcomes(pairs.size());

    util::parallel_for(pairs.size(), options.max_in_flight, [&](std::size_t i) {
        const Pair& p = pairs[i];
        if (g.find_edge(p.kind, p.a, p.b)) {
            outcomes[i].state = Outcome::State::skipped;
            return;
        }
        try {
            auto summary = backend.extract(*p.target, *p.subject);
            if (summary) {
                outcomes[i] = {Outcome::State::summary, std::move(*summary)};
            } else {
                outcomes[i].state = Outcome::State::none;
            }
        } catch (const std::exception& e) {
            outcomes[i] = {Outcome::State::failed, e.what()};
        }
    });

    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const Pair& p = pairs[i];
        Outcome& o = outcomes[i];
        switch (o.state) {
            case Outcome::State::skipped:
            case Outcome::State::none:
                ++report.pairs_skipped;
                break;
            case Outcome::State::summary:
                g.insert_edge(p.kind, p.a, p.b, std::move(o.text));
                ++report.edges_created;
                break;
            case Outcome::State::failed:
                ++report.pairs_failed;
                report.failures.push_back(
                    {edge_kind_name(p.kind), p.a, p.b, std::move(o.text)});
                break;
        }
    }
    return report;
}

std::string AnnotationReport::to_json() const {
    json j{{"edges_created", edges_created},
           {"pairs_skipped", pairs_skipped},
           {"pairs_failed", pairs_failed}};
    return j.dump(2) + "\n";
}

void write_failed_pairs(const std::filesystem::path& path,
                        const std::vector<FailedPair>& failures) {
    std::ostringstream out;
    for (const auto& f : failures) {
        json j{{"kind", f.kind}, {"a", f.a}, {"b", f.b}, {"error", f.error}};
        out << j.dump() << "\n";
    }
    util::write_file_atomic(path, out.str());
}

} // namespace tkg
