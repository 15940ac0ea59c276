#include "tkg/errors.hpp"
#include "tkg/prompt.hpp"

#include <doctest.h>

#include "helpers.hpp"

using namespace tkg;

namespace {

Ontology patient_ontology() {
    Ontology o;
    o.version = "t";
    ConceptClass cls;
    cls.name = "symptoms";
    cls.class_id = "symptoms";
    Concept c;
    c.concept_id = "symptoms/blood-pressure";
    c.class_id = "symptoms";
    c.name = "blood pressure";
    cls.concepts.push_back(c);
    o.classes.push_back(std::move(cls));
    return o;
}

} // namespace

TEST_CASE("token counting uses the ceil(chars/4) heuristic") {
    HeuristicTokenCounter counter;
    CHECK(count_tokens("", counter) == 0);
    CHECK(count_tokens(std::string(400, 'x'), counter) == 100);
    CHECK(count_tokens("abc", counter) == 1);
    CHECK(count_tokens("abcd", counter) == 1);
    CHECK(count_tokens("abcde", counter) == 2);
    CHECK(count_tokens("same text", counter) == count_tokens("same text", counter));
}

TEST_CASE("minimal assembly gives query, finding and evidence blocks") {
    auto f = testing::make_patient_fixture();
    auto dists = build_distributions(score_all(f.graph));
    auto cg = build_classification_graph(f.graph, dists, "barbara-schmidt");
    classify(cg, Thresholds{0.9, 0.5});

    QueryTemplate tmpl;
    PromptPlan plan = assemble_prompt("barbara-schmidt", f.graph, cg, tmpl, patient_ontology());

    REQUIRE(plan.blocks.size() == 3);
    CHECK(plan.blocks[0].kind == PromptBlock::Kind::query);
    CHECK(plan.blocks[0].text.find("Barbara Schmidt") != std::string::npos);
    CHECK(plan.blocks[1].kind == PromptBlock::Kind::object_concept_summary);
    CHECK(plan.blocks[1].text == "barbara pressure finding");
    CHECK(plan.blocks[2].kind == PromptBlock::Kind::concept_chunk_summary);
    CHECK(plan.blocks[2].text == "summary chunk II");
    REQUIRE(plan.blocks[2].provenance.has_value());
    CHECK(plan.blocks[2].provenance->doc_id == "guide-x");
    CHECK(plan.blocks[2].provenance->heading == "Blood pressure management");
    CHECK(plan.blocks[2].provenance->chunk_id == f.chunk_2);
    CHECK(plan.token_count == HeuristicTokenCounter{}.count(render(plan)));
}

TEST_CASE("concepts with no selected chunk still contribute their finding") {
    auto f = testing::make_patient_fixture();
    auto dists = build_distributions(score_all(f.graph));
    auto cg = build_classification_graph(f.graph, dists, "peter-mueller");
    classify(cg, Thresholds{0.9, 0.5}); // nothing selected for peter

    PromptPlan plan =
        assemble_prompt("peter-mueller", f.graph, cg, QueryTemplate{}, patient_ontology());
    REQUIRE(plan.blocks.size() == 2);
    CHECK(plan.blocks[1].kind == PromptBlock::Kind::object_concept_summary);
    CHECK(plan.blocks[1].text == "peter pressure finding");
}

TEST_CASE("within a concept, evidence follows document order") {
    TripartiteGraph g;
    testing::add_document(g, "doc", "H",
                          {"c0 text.", "c1 text.", "c2 text.", "c3 text.", "c4 text.",
                           "c5 text.", "c6 text.", "c7 text.", "c8 text.", "c9 text."});
    testing::add_concept(g, "cls", "cls", "cls/a", "a");
    testing::add_object(g, "obj", "Obj", "object body");

    // Two selected chunks c5 and c9; c5 comes earlier in the chain.
    g.insert_edge(EdgeKind::object_concept, "obj", "cls/a", "finding a");
    g.insert_edge(EdgeKind::concept_chunk, "cls/a", "doc:s0:c9", "evidence nine");
    g.insert_edge(EdgeKind::concept_chunk, "cls/a", "doc:s0:c5", "evidence five");

    ClassificationGraph cg;
    cg.object_id = "obj";
    for (const auto& chunk : {"doc:s0:c9", "doc:s0:c5"}) {
        ClassificationNode n;
        n.concept_id = "cls/a";
        n.chunk_id = chunk;
        n.p = 1.0;
        n.state = 1;
        n.activated_by = Activation::alpha;
        cg.nodes.push_back(n);
    }

    Ontology o;
    o.version = "t";
    ConceptClass cls;
    cls.name = "cls";
    cls.class_id = "cls";
    Concept c;
    c.concept_id = "cls/a";
    c.class_id = "cls";
    c.name = "a";
    cls.concepts.push_back(c);
    o.classes.push_back(cls);

    PromptPlan plan = assemble_prompt("obj", g, cg, QueryTemplate{}, o);
    REQUIRE(plan.blocks.size() == 4);
    CHECK(plan.blocks[2].text == "evidence five");
    CHECK(plan.blocks[3].text == "evidence nine");
}

TEST_CASE("across concepts, order equals ontology declaration order") {
    TripartiteGraph g;
    testing::add_document(g, "doc", "H", {"only chunk."});
    testing::add_concept(g, "cls", "cls", "cls/zeta", "zeta");
    testing::add_concept(g, "cls", "cls", "cls/alpha", "alpha");
    testing::add_object(g, "obj", "Obj", "body");
    g.insert_edge(EdgeKind::object_concept, "obj", "cls/zeta", "zeta finding");
    g.insert_edge(EdgeKind::object_concept, "obj", "cls/alpha", "alpha finding");

    // Ontology declares zeta before alpha.
    Ontology o;
    o.version = "t";
    ConceptClass cls;
    cls.name = "cls";
    cls.class_id = "cls";
    for (const auto& name : {"zeta", "alpha"}) {
        Concept c;
        c.concept_id = std::string("cls/") + name;
        c.class_id = "cls";
        c.name = name;
        cls.concepts.push_back(c);
    }
    o.classes.push_back(cls);

    ClassificationGraph cg;
    cg.object_id = "obj";
    PromptPlan plan = assemble_prompt("obj", g, cg, QueryTemplate{}, o);
    REQUIRE(plan.blocks.size() == 3);
    CHECK(plan.blocks[1].text == "zeta finding");
    CHECK(plan.blocks[2].text == "alpha finding");
}

TEST_CASE("render produces labeled segments with bracketed provenance") {
    auto f = testing::make_patient_fixture();
    auto dists = build_distributions(score_all(f.graph));
    auto cg = build_classification_graph(f.graph, dists, "barbara-schmidt");
    classify(cg, Thresholds{0.9, 0.5});
    PromptPlan plan =
        assemble_prompt("barbara-schmidt", f.graph, cg, QueryTemplate{}, patient_ontology());

    std::string text = render(plan);
    CHECK(text.find("[query]\n") == 0);
    CHECK(text.find("[finding symptoms/blood-pressure]") != std::string::npos);
    CHECK(text.find("[evidence symptoms/blood-pressure]") != std::string::npos);
    CHECK(text.find("[guide-x § Blood pressure management / guide-x:s0:c1]") !=
          std::string::npos);
    CHECK(render(plan) == text); // byte-identical on repeat

    // Plan with only the query renders the query text alone.
    PromptPlan bare;
    bare.object_id = "x";
    PromptBlock q;
    q.kind = PromptBlock::Kind::query;
    q.text = "the question";
    bare.blocks.push_back(q);
    CHECK(render(bare) == "[query]\nthe question\n");
}

TEST_CASE("selected pairs and evidence blocks are in bijection") {
    auto f = testing::make_patient_fixture();
    auto dists = build_distributions(score_all(f.graph));

    for (const char* object : {"barbara-schmidt", "oskar-lehm", "peter-mueller"}) {
        auto cg = build_classification_graph(f.graph, dists, object);
        classify(cg, Thresholds{0.5, 0.3});
        PromptPlan plan =
            assemble_prompt(object, f.graph, cg, QueryTemplate{}, patient_ontology());

        std::multiset<std::pair<std::string, std::string>> from_plan;
        for (const auto& b : plan.blocks) {
            if (b.kind == PromptBlock::Kind::concept_chunk_summary) {
                REQUIRE(b.provenance.has_value());
                from_plan.insert({b.concept_id, b.provenance->chunk_id});
            }
        }
        std::multiset<std::pair<std::string, std::string>> from_classification;
        for (const auto& p : selected_pairs(cg)) {
            from_classification.insert({p.concept_id, p.chunk_id});
        }
        CHECK(from_plan == from_classification);
    }
}

TEST_CASE("removing a selected pair removes exactly one block and keeps order") {
    auto f = testing::make_patient_fixture();
    auto dists = build_distributions(score_all(f.graph));
    auto cg = build_classification_graph(f.graph, dists, "barbara-schmidt");
    classify(cg, Thresholds{0.4, 0.3}); // selects both chunks

    PromptPlan full =
        assemble_prompt("barbara-schmidt", f.graph, cg, QueryTemplate{}, patient_ontology());

    // Drop one selected node and reassemble.
    ClassificationGraph smaller = cg;
    for (auto& n : smaller.nodes) {
        if (n.chunk_id == f.chunk_1) {
            n.state = 0;
            n.activated_by = Activation::none;
        }
    }
    PromptPlan reduced =
        assemble_prompt("barbara-schmidt", f.graph, smaller, QueryTemplate{}, patient_ontology());

    CHECK(full.blocks.size() == reduced.blocks.size() + 1);
    // The surviving blocks appear in the same relative order.
    std::size_t i = 0;
    for (const auto& b : full.blocks) {
        if (i < reduced.blocks.size() && b.kind == reduced.blocks[i].kind &&
            b.text == reduced.blocks[i].text) {
            ++i;
        }
    }
    CHECK(i == reduced.blocks.size());
}

TEST_CASE("assembly rejects mismatched classification or unknown concepts") {
    auto f = testing::make_patient_fixture();
    ClassificationGraph cg;
    cg.object_id = "someone-else";
    CHECK_THROWS_AS(
        assemble_prompt("barbara-schmidt", f.graph, cg, QueryTemplate{}, patient_ontology()),
        Error);

    // Classification naming a concept the ontology does not declare.
    ClassificationGraph bad;
    bad.object_id = "barbara-schmidt";
    ClassificationNode n;
    n.concept_id = "symptoms/unknown";
    n.chunk_id = f.chunk_1;
    n.state = 1;
    n.activated_by = Activation::alpha;
    bad.nodes.push_back(n);
    try {
        assemble_prompt("barbara-schmidt", f.graph, bad, QueryTemplate{}, patient_ontology());
        FAIL("expected UnknownConcept");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::unknown_concept);
    }
}

TEST_CASE("plan json export carries blocks and provenance") {
    auto f = testing::make_patient_fixture();
    auto dists = build_distributions(score_all(f.graph));
    auto cg = build_classification_graph(f.graph, dists, "barbara-schmidt");
    classify(cg, Thresholds{0.9, 0.5});
    PromptPlan plan =
        assemble_prompt("barbara-schmidt", f.graph, cg, QueryTemplate{}, patient_ontology());

    std::string j = plan_to_json(plan);
    CHECK(j.find("\"object_id\": \"barbara-schmidt\"") != std::string::npos);
    CHECK(j.find("\"token_count\"") != std::string::npos);
    CHECK(j.find("\"provenance\"") != std::string::npos);
}
