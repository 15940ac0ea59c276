#include "tkg/errors.hpp"
#include "tkg/ontology.hpp"
#include "tkg/util.hpp"

#include <doctest.h>

using namespace tkg;

TEST_CASE("parses a minimal ontology") {
    auto o = parse_ontology(R"({"version":"1","classes":[
        {"name":"symptoms","concepts":[{"name":"blood pressure"}]}]})");
    REQUIRE(o.classes.size() == 1);
    CHECK(o.classes[0].class_id == "symptoms");
    REQUIRE(o.classes[0].concepts.size() == 1);
    CHECK(o.classes[0].concepts[0].concept_id == "symptoms/blood-pressure");
    CHECK(o.concept_count() == 1);
}

TEST_CASE("duplicate concept in one class is rejected") {
    const char* text = R"({"version":"1","classes":[
        {"name":"diseases","concepts":[{"name":"diabetes"},{"name":"diabetes"}]}]})";
    try {
        parse_ontology(text);
        FAIL("expected DuplicateConcept");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::duplicate_concept);
    }
}

TEST_CASE("empty class is rejected") {
    try {
        parse_ontology(R"({"version":"1","classes":[{"name":"empty","concepts":[]}]})");
        FAIL("expected EmptyClass");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::empty_class);
    }
}

TEST_CASE("syntax errors report a byte position") {
    try {
        parse_ontology("{\"version\": \"1\", ");
        FAIL("expected SyntaxError");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::syntax_error);
        CHECK(std::string(e.what()).find("byte") != std::string::npos);
    }
}

TEST_CASE("bundled ontology has 4 classes and 27 concepts") {
    auto o = parse_ontology(util::read_file(TKG_FIXTURE_DIR "/ontology.json"));
    CHECK(o.classes.size() == 4);
    CHECK(o.concept_count() == 27);
    CHECK(validate_ontology(o).empty());
}

TEST_CASE("iteration follows declaration order") {
    auto o = parse_ontology(R"({"version":"1","classes":[
        {"name":"zeta","concepts":[{"name":"z2"},{"name":"a1"}]},
        {"name":"alpha","concepts":[{"name":"m"}]}]})");
    auto all = o.all_concepts();
    REQUIRE(all.size() == 3);
    CHECK(all[0]->concept_id == "zeta/z2");
    CHECK(all[1]->concept_id == "zeta/a1");
    CHECK(all[2]->concept_id == "alpha/m");
}

TEST_CASE("serialize then parse is the identity on valid ontologies") {
    auto check_roundtrip = [](const std::string& text) {
        Ontology a = parse_ontology(text);
        Ontology b = parse_ontology(serialize_ontology(a));
        REQUIRE(a.classes.size() == b.classes.size());
        CHECK(a.version == b.version);
        for (std::size_t i = 0; i < a.classes.size(); ++i) {
            CHECK(a.classes[i].class_id == b.classes[i].class_id);
            REQUIRE(a.classes[i].concepts.size() == b.classes[i].concepts.size());
            for (std::size_t j = 0; j < a.classes[i].concepts.size(); ++j) {
                const Concept& x = a.classes[i].concepts[j];
                const Concept& y = b.classes[i].concepts[j];
                CHECK(x.concept_id == y.concept_id);
                CHECK(x.name == y.name);
                CHECK(x.description == y.description);
                CHECK(x.keywords == y.keywords);
            }
        }
        // Serialized form is a fixed point byte-wise.
        CHECK(serialize_ontology(a) == serialize_ontology(b));
    };
    check_roundtrip(util::read_file(TKG_FIXTURE_DIR "/ontology.json"));
    check_roundtrip(R"({"version":"x","classes":[
        {"name":"c","concepts":[{"name":"n","description":"d","keywords":["k1","k2"]}]}]})");
}

TEST_CASE("validate_ontology reports violations as data") {
    Ontology o;
    o.version = "1";
    ConceptClass empty_cls;
    empty_cls.name = "void";
    empty_cls.class_id = "void";
    o.classes.push_back(empty_cls);

    ConceptClass a;
    a.name = "a";
    a.class_id = "a";
    a.concepts.push_back(Concept{"shared/id", "a", "one", std::nullopt, {}});
    ConceptClass b;
    b.name = "b";
    b.class_id = "b";
    b.concepts.push_back(Concept{"shared/id", "b", "two", std::nullopt, {}});
    o.classes.push_back(a);
    o.classes.push_back(b);

    auto violations = validate_ontology(o);
    REQUIRE(violations.size() == 2);
    CHECK(violations[0].kind == OntologyViolation::Kind::empty_class);
    CHECK(violations[1].kind == OntologyViolation::Kind::duplicate_concept);

    // The bundled fixture is clean.
    auto ok = parse_ontology(util::read_file(TKG_FIXTURE_DIR "/ontology.json"));
    CHECK(validate_ontology(ok).empty());
}
