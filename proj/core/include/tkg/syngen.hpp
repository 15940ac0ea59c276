#pragma once
// Synthetic corpus and object generator with planted concept mentions.
// Every planted (object, concept, chunk) triple embeds the concept's
// unique marker phrase verbatim in both the object text and the chunk
// text, which makes concept recovery mechanically measurable.
//
// Generation is fully deterministic per seed: the RNG is a fixed xorshift
// variant, so outputs are byte-identical across runs and platforms.

#include "tkg/baseline.hpp"
#include "tkg/ontology.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace tkg::syngen {

struct IntRange {
    int lo = 0;
    int hi = 0; // inclusive
};

struct PlantPlan {
    std::uint64_t seed = 42;
    int docs = 6;
    IntRange sections_per_doc{6, 8};
    IntRange chunks_per_section{6, 8};
    const Ontology* ontology = nullptr; // required
    int objects = 3;
    IntRange concepts_per_object{7, 15};
    // Supports per (object, concept) planted into this many chunks.
    IntRange chunks_per_planting{1, 2};
    // Empty -> markers are generated; entries must be pairwise non-substring.
    std::map<std::string, std::string> marker_map;
};

struct GeneratedPaths {
    std::filesystem::path corpus_dir;
    std::filesystem::path objects_dir;
    std::filesystem::path gold_path;
};

// Writes corpus/<doc>.txt, objects/<object>.txt and gold.json under
// out_dir. Returns the written paths. Deterministic per plan.seed.
// Throws Error(marker_collision) if marker phrases are not pairwise
// substring-free, Error(invalid_config) on a broken plan.
GeneratedPaths generate(const PlantPlan& plan, const std::filesystem::path& out_dir);

// Marker phrases for every concept of the ontology (three rare
// pseudo-words per concept). Exposed for tests.
std::map<std::string, std::string> make_marker_map(const Ontology& ontology,
                                                   std::uint64_t seed);

} // namespace tkg::syngen
