#include "tkg/classify.hpp"

#include "tkg/errors.hpp"
#include "tkg/util.hpp"

#include <json.hpp>

#include <algorithm>

namespace tkg {

using nlohmann::json;

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::none: return "none";
        case Activation::alpha: return "alpha";
        case Activation::beta: return "beta";
    }
    return "?";
}

std::optional<std::string> Thresholds::warning() const {
    if (beta > alpha) {
        return "beta (" + util::format_double(beta) + ") exceeds alpha (" +
               util::format_double(alpha) + "); the beta rule can never add a selection";
    }
    return std::nullopt;
}

ClassificationGraph build_classification_graph(
    const TripartiteGraph& g, const std::map<std::string, ConceptDistribution>& distributions,
    const std::string& object_id) {
    if (!g.object(object_id)) raise(Errc::unknown_object, object_id);

    ClassificationGraph cg;
    cg.object_id = object_id;

    // Concepts this object is connected to, with their e_{o,c} embeddings.
    std::map<std::string, const Edge*> oc_edges;
    for (const auto& [id, e] : g.edges()) {
        if (e.kind == EdgeKind::object_concept && e.a == object_id) oc_edges[e.b] = &e;
    }

    auto need_embedding = [](const Edge* e) -> const std::vector<double>& {
        if (!e->embedding) raise(Errc::missing_embedding, "edge " + e->edge_id);
        return *e->embedding;
    };

    for (const auto& [concept_id, oc] : oc_edges) {
        for (const auto& [edge_id, e] : g.edges()) {
            if (e.kind != EdgeKind::concept_chunk || e.a != concept_id) continue;
            auto dist_it = distributions.find(concept_id);
            if (dist_it == distributions.end()) {
                raise(Errc::missing_distribution, "concept " + concept_id);
            }
            ClassificationNode node;
            node.concept_id = concept_id;
            node.chunk_id = e.b;
            node.w = cosine(need_embedding(oc), need_embedding(&e));
            node.p = empirical_probability(dist_it->second, node.w);
            cg.nodes.push_back(std::move(node));
        }
    }
    std::sort(cg.nodes.begin(), cg.nodes.end(),
              [](const ClassificationNode& a, const ClassificationNode& b) {
                  if (a.concept_id != b.concept_id) return a.concept_id < b.concept_id;
                  return a.chunk_id < b.chunk_id;
              });

    // Interaction edges: same chunk, distinct concepts.
    for (std::size_t i = 0; i < cg.nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < cg.nodes.size(); ++j) {
            if (cg.nodes[i].chunk_id == cg.nodes[j].chunk_id &&
                cg.nodes[i].concept_id != cg.nodes[j].concept_id) {
                cg.interaction_edges.emplace_back(i, j);
            }
        }
    }
    std::sort(cg.interaction_edges.begin(), cg.interaction_edges.end());
    return cg;
}

void classify(ClassificationGraph& cg, const Thresholds& thresholds,
              const ClassifyOptions& options) {
    for (auto& node : cg.nodes) {
        if (node.p > thresholds.alpha) {
            node.state = 1;
            node.activated_by = Activation::alpha;
        } else {
            node.state = 0;
            node.activated_by = Activation::none;
        }
    }

    std::vector<std::vector<std::size_t>> adjacency(cg.nodes.size());
    for (const auto& [i, j] : cg.interaction_edges) {
        adjacency[i].push_back(j);
        adjacency[j].push_back(i);
    }

    // Pass 2: a node crosses beta if an alpha-activated neighbor exists.
    // States are read from the alpha pass only, so visit order is moot.
    auto beta_sweep = [&](auto anchor_ok) {
        std::vector<std::size_t> activated;
        for (std::size_t i = 0; i < cg.nodes.size(); ++i) {
            auto& node = cg.nodes[i];
            if (node.state == 1 || node.p <= thresholds.beta) continue;
            bool anchored = std::any_of(adjacency[i].begin(), adjacency[i].end(),
                                        [&](std::size_t n) { return anchor_ok(cg.nodes[n]); });
            if (anchored) activated.push_back(i);
        }
        for (std::size_t i : activated) {
            cg.nodes[i].state = 1;
            cg.nodes[i].activated_by = Activation::beta;
        }
        return !activated.empty();
    };

    beta_sweep([](const ClassificationNode& n) { return n.activated_by == Activation::alpha; });

    if (options.propagate_beta) {
        // Fixed-point variant: any activated neighbor anchors.
        while (beta_sweep([](const ClassificationNode& n) { return n.state == 1; })) {
        }
    }
}

std::vector<SelectedPair> selected_pairs(const ClassificationGraph& cg) {
    std::vector<SelectedPair> out;
    for (const auto& node : cg.nodes) {
        if (node.state == 1) out.push_back({node.concept_id, node.chunk_id, node.activated_by});
    }
    std::sort(out.begin(), out.end(), [](const SelectedPair& a, const SelectedPair& b) {
        if (a.concept_id != b.concept_id) return a.concept_id < b.concept_id;
        if (a.activated_by != b.activated_by) {
            return static_cast<int>(a.activated_by) < static_cast<int>(b.activated_by);
        }
        return a.chunk_id < b.chunk_id;
    });
    return out;
}

std::string classification_to_json(const ClassificationGraph& cg, const Thresholds& thresholds) {
    json nodes = json::array();
    for (const auto& n : cg.nodes) {
        nodes.push_back(json{{"concept", n.concept_id},
                             {"chunk", n.chunk_id},
                             {"w", n.w},
                             {"p", n.p},
                             {"state", n.state},
                             {"activated_by", activation_name(n.activated_by)}});
    }
    json doc{{"object_id", cg.object_id},
             {"alpha", thresholds.alpha},
             {"beta", thresholds.beta},
             {"nodes", nodes}};
    if (auto warn = thresholds.warning()) doc["warning"] = *warn;
    return doc.dump(2) + "\n";
}

void write_classification_json(const std::filesystem::path& path, const ClassificationGraph& cg,
                               const Thresholds& thresholds) {
    util::write_file_atomic(path, classification_to_json(cg, thresholds));
}

StoredClassification load_classification_json(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(util::read_file(path));
    } catch (const json::parse_error& e) {
        raise(Errc::corrupt_record, "classification file: " + std::string(e.what()));
    }
    StoredClassification out;
    try {
        out.graph.object_id = doc.at("object_id").get<std::string>();
        out.thresholds.alpha = doc.at("alpha").get<double>();
        out.thresholds.beta = doc.at("beta").get<double>();
        for (const auto& jn : doc.at("nodes")) {
            ClassificationNode n;
            n.concept_id = jn.at("concept").get<std::string>();
            n.chunk_id = jn.at("chunk").get<std::string>();
            n.w = jn.at("w").get<double>();
            n.p = jn.at("p").get<double>();
            n.state = jn.at("state").get<int>();
            std::string act = jn.at("activated_by").get<std::string>();
            n.activated_by = act == "alpha"  ? Activation::alpha
                             : act == "beta" ? Activation::beta
                                             : Activation::none;
            out.graph.nodes.push_back(std::move(n));
        }
    } catch (const json::exception& e) {
        raise(Errc::corrupt_record, "classification file: " + std::string(e.what()));
    }
    return out;
}

} // namespace tkg
