#include "tkg/annotate.hpp"
#include "tkg/errors.hpp"
#include "tkg/util.hpp"

#include <doctest.h>

#include "helpers.hpp"

#include <atomic>

using namespace tkg;

namespace {

Concept make_concept(const std::string& id, const std::string& name,
                     std::vector<std::string> keywords) {
    Concept c;
    c.concept_id = id;
    c.class_id = "cls";
    c.name = name;
    c.keywords = std::move(keywords);
    return c;
}

Ontology two_concept_ontology() {
    Ontology o;
    o.version = "t";
    ConceptClass cls;
    cls.name = "cls";
    cls.class_id = "cls";
    cls.concepts.push_back(make_concept("cls/pressure", "pressure", {"mmhg", "pressure"}));
    cls.concepts.push_back(make_concept("cls/diabetes", "diabetes", {"diabetes"}));
    o.classes.push_back(std::move(cls));
    return o;
}

// Backend that always fails; used for failure aggregation.
struct FailingAnnotator final : AnnotatorBackend {
    std::optional<std::string> extract(const Concept&, const std::string&) const override {
        raise(Errc::backend_unavailable, "wire down");
    }
};

} // namespace

TEST_CASE("mock annotator keeps matching sentences and drops the rest") {
    MockKeywordAnnotator mock;
    Concept pressure = make_concept("cls/pressure", "blood pressure", {"mmHg"});

    // Ten sentences, exactly two mention the keyword.
    std::string text;
    for (int i = 0; i < 4; ++i) text += "Filler sentence number " + std::to_string(i) + ". ";
    text += "Readings of 150 mmHg were noted. ";
    for (int i = 4; i < 8; ++i) text += "Filler sentence number " + std::to_string(i) + ". ";
    text += "Control below 130 mmHg is advised.";

    auto summary = mock.extract(pressure, text);
    REQUIRE(summary.has_value());
    CHECK(*summary == "Readings of 150 mmHg were noted. Control below 130 mmHg is advised.");

    // Case-insensitive matching, zero hits yield nothing.
    CHECK(mock.extract(make_concept("x", "x", {"MMHG"}), text).has_value());
    CHECK_FALSE(mock.extract(make_concept("cls/diabetes", "diabetes", {"diabetes"}), text)
                    .has_value());
    // No keywords, no match.
    CHECK_FALSE(mock.extract(make_concept("cls/none", "none", {}), text).has_value());
}

TEST_CASE("annotate_chunk creates a concept_chunk edge only on relevance") {
    MockKeywordAnnotator mock;
    ChunkNode chunk;
    chunk.chunk_id = "d:s0:c0";
    chunk.section_id = "d:s0";
    chunk.text = "Targets below 130/80 mmHg are reasonable. Unrelated sentence.";

    auto edge = annotate_chunk(make_concept("cls/pressure", "pressure", {"mmhg"}), chunk, mock);
    REQUIRE(edge.has_value());
    CHECK(edge->kind == EdgeKind::concept_chunk);
    CHECK(edge->a == "cls/pressure");
    CHECK(edge->b == "d:s0:c0");
    CHECK(edge->summary == "Targets below 130/80 mmHg are reasonable.");

    CHECK_FALSE(
        annotate_chunk(make_concept("cls/diabetes", "diabetes", {"diabetes"}), chunk, mock)
            .has_value());
}

TEST_CASE("annotate_object mirrors the chunk contract on object text") {
    MockKeywordAnnotator mock;
    ObjectNode obj;
    obj.object_id = "barbara-schmidt";
    obj.title = "Barbara Schmidt";
    obj.text = "The patient measures at home blood pressure values of 170 - 180/90 mmHg. "
               "She sleeps well.";

    auto edge =
        annotate_object(obj, make_concept("cls/pressure", "blood pressure", {"mmhg"}), mock);
    REQUIRE(edge.has_value());
    CHECK(edge->kind == EdgeKind::object_concept);
    CHECK(edge->a == "barbara-schmidt");
    CHECK(edge->b == "cls/pressure");
    CHECK(edge->summary.find("170 - 180/90 mmHg") != std::string::npos);
    CHECK(edge->summary.find("sleeps well") == std::string::npos);

    CHECK_FALSE(
        annotate_object(obj, make_concept("cls/diabetes", "diabetes", {"diabetes"}), mock)
            .has_value());
}

TEST_CASE("llm annotator treats NONE as no relevance and rejects empty replies") {
    AnnotationTemplate tmpl;
    Concept c = make_concept("cls/pressure", "blood pressure", {});
    c.description = "arterial pressure";

    std::string user = tmpl.render_user(c, "subject text");
    CHECK(user.find("blood pressure") != std::string::npos);
    CHECK(user.find("arterial pressure") != std::string::npos);
    CHECK(user.find("subject text") != std::string::npos);

    auto scripted = llm::make_scripted_chat_client(
        {{user, "  extracted statement  "}, {tmpl.render_user(c, "other"), "NONE"}});
    LlmAnnotator annotator(*scripted, tmpl);
    auto got = annotator.extract(c, "subject text");
    REQUIRE(got.has_value());
    CHECK(*got == "extracted statement");
    CHECK_FALSE(annotator.extract(c, "other").has_value());

    auto empty_reply = llm::make_scripted_chat_client({{user, "   "}});
    LlmAnnotator bad(*empty_reply, tmpl);
    try {
        bad.extract(c, "subject text");
        FAIL("expected BackendMalformedReply");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::backend_malformed_reply);
    }
}

TEST_CASE("run_annotation visits all pairs, is idempotent, aggregates failures") {
    Ontology ontology = two_concept_ontology();

    TripartiteGraph g;
    testing::add_document(g, "doc", "H",
                          {"Pressure was 150 mmHg today.", "Diabetes management text.",
                           "Nothing relevant at all."});
    testing::add_concept(g, "cls", "cls", "cls/pressure", "pressure");
    testing::add_concept(g, "cls", "cls", "cls/diabetes", "diabetes");

    MockKeywordAnnotator mock;
    AnnotationOptions options;
    options.scope = AnnotationScope::chunks;

    auto report = run_annotation(g, ontology, mock, options);
    CHECK(report.edges_created == 2); // 2 concepts x 3 chunks, mock hits 2 pairs
    CHECK(report.pairs_skipped == 4);
    CHECK(report.pairs_failed == 0);
    CHECK(report.edges_created + report.pairs_skipped + report.pairs_failed == 6);

    // Second run creates nothing and touches nothing.
    std::string before = graph_to_jsonl(g);
    auto again = run_annotation(g, ontology, mock, options);
    CHECK(again.edges_created == 0);
    CHECK(graph_to_jsonl(g) == before);

    // Failures are aggregated, never thrown.
    TripartiteGraph g2;
    testing::add_document(g2, "doc", "H", {"one chunk."});
    testing::add_concept(g2, "cls", "cls", "cls/pressure", "pressure");
    testing::add_concept(g2, "cls", "cls", "cls/diabetes", "diabetes");
    FailingAnnotator failing;
    auto failed = run_annotation(g2, ontology, failing, options);
    CHECK(failed.pairs_failed == 2);
    REQUIRE(failed.failures.size() == 2);
    CHECK(failed.failures[0].kind == std::string("concept_chunk"));
    CHECK(failed.failures[0].error.find("BackendUnavailable") != std::string::npos);

    testing::TempDir tmp("failed-pairs");
    write_failed_pairs(tmp.path / "failed.jsonl", failed.failures);
    std::string content = util::read_file(tmp.path / "failed.jsonl");
    CHECK(content.find("\"kind\"") != std::string::npos);
    CHECK(content.find("cls/pressure") != std::string::npos);
}

TEST_CASE("empty graph reports zeros") {
    TripartiteGraph g;
    MockKeywordAnnotator mock;
    auto report = run_annotation(g, two_concept_ontology(), mock);
    CHECK(report.edges_created == 0);
    CHECK(report.pairs_skipped == 0);
    CHECK(report.pairs_failed == 0);
}

TEST_CASE("object with eleven planted concepts yields eleven edges") {
    Ontology o;
    o.version = "t";
    ConceptClass cls;
    cls.name = "cls";
    cls.class_id = "cls";
    std::string text = "Opening filler sentence without keywords.";
    for (int i = 0; i < 11; ++i) {
        std::string name = "concept" + std::to_string(i);
        cls.concepts.push_back(make_concept("cls/" + name, name, {name}));
        text += " The record mentions " + name + " explicitly.";
    }
    // Three concepts beyond the planted ones.
    for (int i = 11; i < 14; ++i) {
        std::string name = "concept" + std::to_string(i);
        cls.concepts.push_back(make_concept("cls/" + name, name, {name}));
    }
    o.classes.push_back(std::move(cls));

    TripartiteGraph g;
    testing::add_object(g, "case", "Case", text);
    for (const Concept* c : o.all_concepts()) {
        testing::add_concept(g, "cls", "cls", c->concept_id, c->name);
    }

    MockKeywordAnnotator mock;
    AnnotationOptions options;
    options.scope = AnnotationScope::objects;
    auto report = run_annotation(g, o, mock, options);
    CHECK(report.edges_created == 11);

    std::size_t oc_edges = 0;
    for (const auto& [id, e] : g.edges()) {
        if (e.kind == EdgeKind::object_concept) ++oc_edges;
    }
    CHECK(oc_edges == 11);
}

TEST_CASE("summaries are concept-specific even for the same chunk") {
    MockKeywordAnnotator mock;
    ChunkNode chunk;
    chunk.chunk_id = "d:s0:c0";
    chunk.section_id = "d:s0";
    chunk.text = "Pressure was 150 mmHg. Diabetes control is poor. Weather is fine.";

    auto a = annotate_chunk(make_concept("cls/pressure", "pressure", {"mmhg"}), chunk, mock);
    auto b = annotate_chunk(make_concept("cls/diabetes", "diabetes", {"diabetes"}), chunk, mock);
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(a->summary != b->summary);
    CHECK(a->summary == "Pressure was 150 mmHg.");
    CHECK(b->summary == "Diabetes control is poor.");
}

TEST_CASE("mock backend is deterministic and safe under parallel annotation") {
    Ontology ontology = two_concept_ontology();
    TripartiteGraph base;
    testing::add_document(base, "doc", "H",
                          {"Pressure was 150 mmHg today.", "Diabetes management text.",
                           "More mmHg pressure data.", "And diabetes again here."});
    testing::add_concept(base, "cls", "cls", "cls/pressure", "pressure");
    testing::add_concept(base, "cls", "cls", "cls/diabetes", "diabetes");

    MockKeywordAnnotator mock;
    AnnotationOptions serial{AnnotationScope::chunks, 1};
    AnnotationOptions parallel{AnnotationScope::chunks, 8};

    TripartiteGraph g1 = graph_from_jsonl(graph_to_jsonl(base));
    TripartiteGraph g2 = graph_from_jsonl(graph_to_jsonl(base));
    run_annotation(g1, ontology, mock, serial);
    run_annotation(g2, ontology, mock, parallel);
    CHECK(graph_to_jsonl(g1) == graph_to_jsonl(g2));
}
