#include "tkg/syngen.hpp"

#include "tkg/corpus.hpp"
#include "tkg/errors.hpp"
#include "tkg/graph.hpp"
#include "tkg/util.hpp"

#include <algorithm>
#include <array>
#include <set>
#include <sstream>

namespace tkg::syngen {

namespace {

// splitmix64: stable across platforms, unlike <random> distributions.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Inclusive bounds. Modulo bias is irrelevant at these ranges.
    int uniform(int lo, int hi) {
        if (hi <= lo) return lo;
        return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }

    int uniform(const IntRange& r) { return uniform(r.lo, r.hi); }

    template <typename T>
    const T& pick(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(uniform(0, static_cast<int>(v.size()) - 1))];
    }

    double chance() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

const std::vector<std::string>& lorem_pool() {
    static const std::vector<std::string> pool = {
        "aliment",  "borealis", "cadence",  "dorsum",  "ephemera", "fulcrum",  "gossamer",
        "halcyon",  "isthmus",  "juncture", "kinetic", "lattice",  "meridian", "nocturne",
        "obelisk",  "palisade", "quorum",   "rampart", "sonorous", "tessera",  "umbral",
        "verdant",  "willow",   "xenial",   "yonder",  "zephyr",   "arbor",    "bastion",
        "cistern",  "delta",    "ember",    "furrow",  "grove",    "harbor",   "inlet",
        "jetty",    "knoll",    "lagoon",   "mesa",    "nadir",    "oasis",    "prairie",
        "quarry",   "ravine",   "summit",   "terrace", "upland",   "vale",     "wharf",
        "zenith",   "basalt",   "cobble",   "drift",   "eddy",     "fjord",    "glacier",
        "heath",    "iceberg",  "jungle",   "karst",   "loam",     "marsh",    "notch",
        "outcrop",  "pebble",   "ridge",    "shale",   "tundra",   "undertow", "vortex",
        "weir",     "atoll",    "bight",    "cairn",   "dune",     "escarp",   "floe",
        "gully",    "hollow",   "islet"};
    return pool;
}

const std::vector<std::string>& marker_syllables() {
    static const std::vector<std::string> syl = {"ba", "ce", "di", "fo", "gu", "ka", "le", "mi",
                                                 "no", "pu", "ra", "se", "ti", "vo", "wu", "za"};
    return syl;
}

std::string capitalize(std::string s) {
    if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
    return s;
}

std::string filler_sentence(Rng& rng) {
    int words = rng.uniform(7, 11);
    std::ostringstream out;
    for (int i = 0; i < words; ++i) {
        std::string w = rng.pick(lorem_pool());
        if (i == 0) w = capitalize(w);
        out << (i ? " " : "") << w;
    }
    out << '.';
    return out.str();
}

std::string two_lorem_words(Rng& rng) {
    return rng.pick(lorem_pool()) + " " + rng.pick(lorem_pool());
}

std::string heading_text(Rng& rng) {
    int words = rng.uniform(2, 4);
    std::ostringstream out;
    for (int i = 0; i < words; ++i) {
        std::string w = rng.pick(lorem_pool());
        if (i == 0) w = capitalize(w);
        out << (i ? " " : "") << w;
    }
    return out.str();
}

std::string pseudo_word(Rng& rng) {
    std::string w;
    for (int i = 0; i < 3; ++i) w += rng.pick(marker_syllables());
    return w;
}

void check_markers(const std::map<std::string, std::string>& markers) {
    for (auto it = markers.begin(); it != markers.end(); ++it) {
        if (it->second.empty()) raise(Errc::marker_collision, "empty marker for " + it->first);
        for (auto jt = std::next(it); jt != markers.end(); ++jt) {
            const std::string& a = it->second;
            const std::string& b = jt->second;
            if (a.find(b) != std::string::npos || b.find(a) != std::string::npos) {
                raise(Errc::marker_collision,
                      "\"" + a + "\" and \"" + b + "\" overlap as substrings");
            }
        }
    }
}

} // namespace

std::map<std::string, std::string> make_marker_map(const Ontology& ontology,
                                                   std::uint64_t seed) {
    Rng rng(seed ^ 0x6d61726b65727321ull);
    std::map<std::string, std::string> markers;
    std::set<std::string> used;
    for (const Concept* c : ontology.all_concepts()) {
        std::string marker;
        for (int attempt = 0; attempt < 100; ++attempt) {
            marker = pseudo_word(rng) + " " + pseudo_word(rng) + " " + pseudo_word(rng);
            bool clash = false;
            for (const auto& m : used) {
                if (m.find(marker) != std::string::npos || marker.find(m) != std::string::npos) {
                    clash = true;
                    break;
                }
            }
            if (!clash) break;
            marker.clear();
        }
        if (marker.empty()) raise(Errc::marker_collision, "could not derive marker for " + c->concept_id);
        used.insert(marker);
        markers[c->concept_id] = marker;
    }
    return markers;
}

GeneratedPaths generate(const PlantPlan& plan, const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    if (!plan.ontology) raise(Errc::invalid_config, "plan has no ontology");
    if (plan.docs <= 0) raise(Errc::invalid_config, "plan.docs must be positive");
    if (plan.objects < 0) raise(Errc::invalid_config, "plan.objects must be non-negative");

    std::vector<const Concept*> concepts = plan.ontology->all_concepts();
    if (concepts.empty()) raise(Errc::invalid_config, "ontology has no concepts");

    std::map<std::string, std::string> markers =
        plan.marker_map.empty() ? make_marker_map(*plan.ontology, plan.seed) : plan.marker_map;
    for (const Concept* c : concepts) {
        if (!markers.count(c->concept_id)) {
            raise(Errc::invalid_config, "marker_map misses concept " + c->concept_id);
        }
    }
    check_markers(markers);

    Rng rng(plan.seed);

    // Section bodies as sentence lists: docs -> sections -> sentences.
    struct GenSection {
        std::string heading;
        std::vector<std::string> sentences;
    };
    struct GenDoc {
        std::string doc_id;
        std::vector<GenSection> sections;
    };

    std::vector<GenDoc> docs;
    for (int d = 0; d < plan.docs; ++d) {
        GenDoc doc;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "guide-%02d", d + 1);
        doc.doc_id = buf;
        int sections = rng.uniform(plan.sections_per_doc);
        for (int s = 0; s < sections; ++s) {
            GenSection sec;
            sec.heading = heading_text(rng);
            // Sized so the sentence packer cuts roughly the planned number
            // of chunks out of this section.
            int chunk_slots = rng.uniform(plan.chunks_per_section);
            std::size_t target_chars = static_cast<std::size_t>(chunk_slots) * 1100;
            std::size_t chars = 0;
            while (chars < target_chars) {
                std::string sentence = filler_sentence(rng);
                chars += sentence.size() + 1;
                sec.sentences.push_back(std::move(sentence));
            }
            doc.sections.push_back(std::move(sec));
        }
        docs.push_back(std::move(doc));
    }

    // Objects and their planted concepts.
    struct GenObject {
        std::string object_id;
        std::string title;
        std::vector<std::string> sentences;
        std::vector<const Concept*> planted;
    };
    std::vector<GenObject> objects;

    struct PlantSite {
        int doc;
        int section;
        int index; // sentence position
    };
    std::vector<PlantSite> previous_sites;

    for (int o = 0; o < plan.objects; ++o) {
        GenObject obj;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "case-%02d", o + 1);
        obj.object_id = buf;
        std::snprintf(buf, sizeof(buf), "Case %02d", o + 1);
        obj.title = buf;

        int want = std::min(rng.uniform(plan.concepts_per_object),
                            static_cast<int>(concepts.size()));
        std::set<std::size_t> chosen;
        while (static_cast<int>(chosen.size()) < want) {
            chosen.insert(static_cast<std::size_t>(
                rng.uniform(0, static_cast<int>(concepts.size()) - 1)));
        }
        for (std::size_t idx : chosen) obj.planted.push_back(concepts[idx]);

        // Object body: base filler, then one finding per planted concept
        // with a little filler in between.
        int base_filler = rng.uniform(10, 14);
        for (int i = 0; i < base_filler; ++i) obj.sentences.push_back(filler_sentence(rng));
        for (const Concept* c : obj.planted) {
            std::string finding = "The record for " + obj.title + " notes " + c->name +
                                  " described as " + markers.at(c->concept_id) + " alongside " +
                                  two_lorem_words(rng) + ".";
            obj.sentences.push_back(std::move(finding));
            int pad = rng.uniform(2, 4);
            for (int i = 0; i < pad; ++i) obj.sentences.push_back(filler_sentence(rng));
        }

        // Plant supporting sentences into the corpus.
        for (const Concept* c : obj.planted) {
            int plant_chunks = rng.uniform(plan.chunks_per_planting);
            for (int k = 0; k < plant_chunks; ++k) {
                PlantSite site;
                if (!previous_sites.empty() && rng.chance() < 0.35) {
                    // Bias toward co-discussion: drop next to an earlier plant
                    // so two concepts often share a chunk.
                    const PlantSite& prev = rng.pick(previous_sites);
                    site = prev;
                    site.index = std::min(
                        site.index + 1,
                        static_cast<int>(docs[static_cast<std::size_t>(site.doc)]
                                             .sections[static_cast<std::size_t>(site.section)]
                                             .sentences.size()));
                } else {
                    site.doc = rng.uniform(0, plan.docs - 1);
                    const GenDoc& doc = docs[static_cast<std::size_t>(site.doc)];
                    site.section = rng.uniform(0, static_cast<int>(doc.sections.size()) - 1);
                    site.index = rng.uniform(
                        0, static_cast<int>(
                               doc.sections[static_cast<std::size_t>(site.section)].sentences.size()));
                }
                GenDoc& doc = docs[static_cast<std::size_t>(site.doc)];
                GenSection& sec = doc.sections[static_cast<std::size_t>(site.section)];
                std::string support = "Guidance in " + doc.doc_id + " covers " + c->name +
                                      " citing " + markers.at(c->concept_id) + " near " +
                                      two_lorem_words(rng) + ".";
                sec.sentences.insert(sec.sentences.begin() + site.index, std::move(support));
                previous_sites.push_back(site);
            }
        }
        objects.push_back(std::move(obj));
    }

    // --- render files ----------------------------------------------------
    GeneratedPaths paths;
    paths.corpus_dir = out_dir / "corpus";
    paths.objects_dir = out_dir / "objects";
    paths.gold_path = out_dir / "gold.json";

    for (const auto& doc : docs) {
        std::ostringstream text;
        for (const auto& sec : doc.sections) {
            text << "# " << sec.heading << "\n\n";
            for (std::size_t i = 0; i < sec.sentences.size(); ++i) {
                text << sec.sentences[i];
                // Paragraph break every few sentences.
                if ((i + 1) % 5 == 0) text << "\n\n";
                else text << " ";
            }
            text << "\n\n";
        }
        util::write_file_atomic(paths.corpus_dir / (doc.doc_id + ".txt"), text.str());
    }

    for (const auto& obj : objects) {
        std::ostringstream text;
        text << "# " << obj.title << "\n\n";
        for (std::size_t i = 0; i < obj.sentences.size(); ++i) {
            text << obj.sentences[i];
            if ((i + 1) % 4 == 0) text << "\n\n";
            else text << " ";
        }
        text << "\n";
        util::write_file_atomic(paths.objects_dir / (obj.object_id + ".txt"), text.str());
    }

    // --- gold --------------------------------------------------------------
    // Chunk membership is discovered by running the real ingestion, so the
    // gold file names the exact chunk ids the pipeline will produce.
    TripartiteGraph scratch;
    ChunkingConfig chunking;
    for (const auto& doc : docs) {
        std::string source = util::read_file(paths.corpus_dir / (doc.doc_id + ".txt"));
        ingest_document(scratch, doc.doc_id, doc.doc_id, "", source, chunking);
    }
    std::map<std::string, std::vector<std::string>> chunks_with_marker;
    for (const auto& [concept_id, marker] : markers) {
        for (const auto& [chunk_id, chunk] : scratch.chunks()) {
            if (chunk.text.find(marker) != std::string::npos) {
                chunks_with_marker[concept_id].push_back(chunk_id);
            }
        }
    }

    GoldData gold;
    gold.markers = markers;
    for (const auto& obj : objects) {
        GoldObject go;
        go.object_id = obj.object_id;
        std::vector<const Concept*> sorted = obj.planted;
        std::sort(sorted.begin(), sorted.end(), [](const Concept* a, const Concept* b) {
            return a->concept_id < b->concept_id;
        });
        for (const Concept* c : sorted) {
            GoldConcept gc;
            gc.concept_id = c->concept_id;
            auto it = chunks_with_marker.find(c->concept_id);
            if (it != chunks_with_marker.end()) gc.chunk_ids = it->second;
            go.concepts.push_back(std::move(gc));
        }
        gold.objects.push_back(std::move(go));
    }
    util::write_file_atomic(paths.gold_path, gold_to_json(gold));
    return paths;
}

} // namespace tkg::syngen
