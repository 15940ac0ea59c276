#include "tkg/ontology.hpp"

#include "tkg/errors.hpp"
#include "tkg/util.hpp"

#include <json.hpp>

#include <set>

namespace tkg {

using nlohmann::json;

std::size_t Ontology::concept_count() const {
    std::size_t n = 0;
    for (const auto& cls : classes) n += cls.concepts.size();
    return n;
}

const Concept* Ontology::find_concept(const std::string& concept_id) const {
    for (const auto& cls : classes) {
        for (const auto& c : cls.concepts) {
            if (c.concept_id == concept_id) return &c;
        }
    }
    return nullptr;
}

std::vector<const Concept*> Ontology::all_concepts() const {
    std::vector<const Concept*> out;
    out.reserve(concept_count());
    for (const auto& cls : classes) {
        for (const auto& c : cls.concepts) out.push_back(&c);
    }
    return out;
}

namespace {

const json* get_field(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    const json* f = get_field(obj, key);
    if (!f || !f->is_string()) {
        raise(Errc::syntax_error, where + ": missing or non-string \"" + key + "\"");
    }
    return f->get<std::string>();
}

} // namespace

Ontology parse_ontology(const std::string& contents) {
    json doc;
    try {
        doc = json::parse(contents);
    } catch (const json::parse_error& e) {
        raise(Errc::syntax_error,
              "invalid JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!doc.is_object()) raise(Errc::syntax_error, "top level must be an object");

    Ontology out;
    out.version = require_string(doc, "version", "ontology");

    const json* classes = get_field(doc, "classes");
    if (!classes || !classes->is_array()) {
        raise(Errc::syntax_error, "ontology: missing \"classes\" array");
    }

    std::set<std::string> class_names;
    std::set<std::string> concept_ids;
    for (const auto& jcls : *classes) {
        if (!jcls.is_object()) raise(Errc::syntax_error, "class entries must be objects");
        ConceptClass cls;
        cls.name = require_string(jcls, "name", "class");
        cls.class_id = util::slugify(cls.name);
        if (cls.class_id.empty()) raise(Errc::syntax_error, "class name slug is empty");
        if (!class_names.insert(cls.name).second) {
            raise(Errc::duplicate_concept, "duplicate class name \"" + cls.name + "\"");
        }

        const json* concepts = get_field(jcls, "concepts");
        if (!concepts || !concepts->is_array()) {
            raise(Errc::syntax_error, "class \"" + cls.name + "\": missing \"concepts\" array");
        }
        if (concepts->empty()) {
            raise(Errc::empty_class, "class \"" + cls.name + "\" has no concepts");
        }

        std::set<std::string> names_in_class;
        for (const auto& jc : *concepts) {
            if (!jc.is_object()) raise(Errc::syntax_error, "concept entries must be objects");
            Concept c;
            c.name = require_string(jc, "name", "concept");
            c.class_id = cls.class_id;
            c.concept_id = cls.class_id + "/" + util::slugify(c.name);
            if (!names_in_class.insert(c.name).second) {
                raise(Errc::duplicate_concept,
                      "duplicate concept \"" + c.name + "\" in class \"" + cls.name + "\"");
            }
            if (!concept_ids.insert(c.concept_id).second) {
                raise(Errc::duplicate_concept, "duplicate concept id \"" + c.concept_id + "\"");
            }
            if (const json* d = get_field(jc, "description")) {
                if (!d->is_string()) raise(Errc::syntax_error, "description must be a string");
                c.description = d->get<std::string>();
            }
            if (const json* k = get_field(jc, "keywords")) {
                if (!k->is_array()) raise(Errc::syntax_error, "keywords must be an array");
                for (const auto& kw : *k) {
                    if (!kw.is_string()) raise(Errc::syntax_error, "keywords must be strings");
                    c.keywords.push_back(kw.get<std::string>());
                }
            }
            cls.concepts.push_back(std::move(c));
        }
        out.classes.push_back(std::move(cls));
    }
    return out;
}

std::vector<OntologyViolation> validate_ontology(const Ontology& o) {
    std::vector<OntologyViolation> out;
    std::set<std::string> class_names;
    std::set<std::string> concept_ids;
    for (const auto& cls : o.classes) {
        if (!class_names.insert(cls.name).second) {
            out.push_back({OntologyViolation::Kind::duplicate_class,
                           "class name \"" + cls.name + "\" declared twice"});
        }
        if (cls.concepts.empty()) {
            out.push_back({OntologyViolation::Kind::empty_class,
                           "class \"" + cls.name + "\" has no concepts"});
        }
        std::set<std::string> names_in_class;
        for (const auto& c : cls.concepts) {
            if (!names_in_class.insert(c.name).second) {
                out.push_back({OntologyViolation::Kind::duplicate_concept,
                               "concept \"" + c.name + "\" duplicated in class \"" + cls.name +
                                   "\""});
            }
            if (!concept_ids.insert(c.concept_id).second) {
                out.push_back({OntologyViolation::Kind::duplicate_concept,
                               "concept id \"" + c.concept_id + "\" duplicated"});
            }
        }
    }
    return out;
}

std::string serialize_ontology(const Ontology& o) {
    json doc;
    doc["version"] = o.version;
    json jclasses = json::array();
    for (const auto& cls : o.classes) {
        json jcls;
        jcls["name"] = cls.name;
        json jconcepts = json::array();
        for (const auto& c : cls.concepts) {
            json jc;
            jc["name"] = c.name;
            if (c.description) jc["description"] = *c.description;
            if (!c.keywords.empty()) jc["keywords"] = c.keywords;
            jconcepts.push_back(std::move(jc));
        }
        jcls["concepts"] = std::move(jconcepts);
        jclasses.push_back(std::move(jcls));
    }
    doc["classes"] = std::move(jclasses);
    return doc.dump(2) + "\n";
}

} // namespace tkg
