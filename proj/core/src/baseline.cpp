#include "tkg/baseline.hpp"

#include "tkg/errors.hpp"
#include "tkg/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <sstream>

namespace tkg {

using nlohmann::json;

std::size_t embed_chunks(TripartiteGraph& g, EmbedderBackend& backend, bool force,
                         int max_in_flight) {
    std::vector<std::string> todo;
    for (const auto& [id, chunk] : g.chunks()) {
        if (chunk.embedding && !force) continue;
        todo.push_back(id);
    }
    std::vector<std::vector<double>> results(todo.size());
    util::parallel_for(todo.size(), max_in_flight, [&](std::size_t i) {
        results[i] = backend.embed(g.chunk(todo[i])->text);
    });
    for (std::size_t i = 0; i < todo.size(); ++i) {
        g.set_chunk_embedding(todo[i], std::move(results[i]));
    }
    return todo.size();
}

std::vector<std::string> naive_rag_select(const std::string& query_text,
                                          const TripartiteGraph& g, EmbedderBackend& embedder,
                                          double min_similarity) {
    if (min_similarity < -1.0 || min_similarity > 1.0) {
        raise(Errc::invalid_config,
              "min_similarity " + util::format_double(min_similarity) + " outside [-1, 1]");
    }
    std::vector<double> query = embedder.embed(query_text);

    std::vector<std::pair<double, std::string>> hits;
    for (const auto& [id, chunk] : g.chunks()) {
        if (!chunk.embedding) raise(Errc::missing_embedding, "chunk " + id);
        double sim = cosine(query, *chunk.embedding);
        if (sim >= min_similarity) hits.emplace_back(sim, id);
    }
    std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<std::string> out;
    out.reserve(hits.size());
    for (auto& [sim, id] : hits) out.push_back(std::move(id));
    return out;
}

DensityReport measure_density(const std::string& prompt_text,
                              const std::map<std::string, std::string>& gold_markers,
                              const TokenCounterBackend& counter) {
    if (gold_markers.empty()) raise(Errc::empty_gold, "no gold markers given");
    DensityReport report;
    report.gold_concepts = gold_markers.size();
    for (const auto& [concept_id, marker] : gold_markers) {
        if (prompt_text.find(marker) != std::string::npos) ++report.concepts_recovered;
    }
    report.prompt_tokens = counter.count(prompt_text);
    report.density = report.prompt_tokens == 0
                         ? 0.0
                         : static_cast<double>(report.concepts_recovered) /
                               static_cast<double>(report.prompt_tokens);
    return report;
}

std::map<std::string, std::string> GoldData::markers_for(const std::string& object_id) const {
    std::map<std::string, std::string> out;
    for (const auto& obj : objects) {
        if (obj.object_id != object_id) continue;
        for (const auto& gc : obj.concepts) {
            auto it = markers.find(gc.concept_id);
            if (it != markers.end()) out.emplace(it->first, it->second);
        }
    }
    return out;
}

GoldData load_gold_json(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(util::read_file(path));
    } catch (const json::parse_error& e) {
        raise(Errc::corrupt_record, "gold file: " + std::string(e.what()));
    }
    GoldData gold;
    try {
        for (const auto& jo : doc.at("objects")) {
            GoldObject obj;
            obj.object_id = jo.at("object_id").get<std::string>();
            for (const auto& jc : jo.at("concepts")) {
                GoldConcept gc;
                gc.concept_id = jc.at("concept_id").get<std::string>();
                gc.chunk_ids = jc.at("chunks").get<std::vector<std::string>>();
                obj.concepts.push_back(std::move(gc));
            }
            gold.objects.push_back(std::move(obj));
        }
        if (doc.contains("markers")) {
            for (const auto& [cid, marker] : doc.at("markers").items()) {
                gold.markers[cid] = marker.get<std::string>();
            }
        }
    } catch (const json::exception& e) {
        raise(Errc::corrupt_record, "gold file: " + std::string(e.what()));
    }
    return gold;
}

std::string gold_to_json(const GoldData& gold) {
    json objects = json::array();
    for (const auto& obj : gold.objects) {
        json concepts = json::array();
        for (const auto& gc : obj.concepts) {
            concepts.push_back(json{{"concept_id", gc.concept_id}, {"chunks", gc.chunk_ids}});
        }
        objects.push_back(json{{"object_id", obj.object_id}, {"concepts", concepts}});
    }
    json doc{{"objects", objects}, {"markers", gold.markers}};
    return doc.dump(2) + "\n";
}

namespace {

std::string render_naive_prompt(const QueryTemplate& tmpl, const ObjectNode& object,
                                const TripartiteGraph& g,
                                const std::vector<std::string>& chunk_ids) {
    std::ostringstream out;
    out << "[query]\n" << tmpl.render(object.title) << "\n";
    out << "\n[object]\n" << object.text << "\n";
    for (const auto& id : chunk_ids) {
        out << "\n[chunk " << id << "]\n" << g.chunk(id)->text << "\n";
    }
    return out.str();
}

} // namespace

std::vector<DensityReport> run_comparison(const TripartiteGraph& g, const Ontology& ontology,
                                          const GoldData& gold, const ComparisonConfig& config,
                                          EmbedderBackend& embedder,
                                          const TokenCounterBackend& counter) {
    std::vector<ScoreRecord> records = score_all(g);
    std::map<std::string, ConceptDistribution> distributions = build_distributions(records);

    std::vector<DensityReport> reports;
    for (const auto& [object_id, object] : g.objects()) {
        std::map<std::string, std::string> markers = gold.markers_for(object_id);
        if (markers.empty()) continue; // object not in gold

        // Tripartite pipeline.
        ClassificationGraph cg = build_classification_graph(g, distributions, object_id);
        classify(cg, config.thresholds);
        PromptPlan plan =
            assemble_prompt(object_id, g, cg, config.query_template, ontology, counter);
        DensityReport tri = measure_density(render(plan), markers, counter);
        tri.method = "tripartite";
        tri.object_id = object_id;
        tri.config = "alpha=" + util::format_double(config.thresholds.alpha) +
                     ";beta=" + util::format_double(config.thresholds.beta);
        reports.push_back(std::move(tri));

        // Naive baseline at each similarity minimum.
        for (double min_sim : config.naive_minima) {
            std::vector<std::string> selected =
                naive_rag_select(object.text, g, embedder, min_sim);
            std::string prompt =
                render_naive_prompt(config.query_template, object, g, selected);
            DensityReport naive = measure_density(prompt, markers, counter);
            naive.method = "naive";
            naive.object_id = object_id;
            naive.config = "min_sim=" + util::format_double(min_sim);
            reports.push_back(std::move(naive));
        }
    }
    return reports;
}

namespace {

std::string density_table(const std::vector<DensityReport>& reports, char sep) {
    std::ostringstream out;
    out << "method" << sep << "object_id" << sep << "config" << sep << "prompt_tokens" << sep
        << "concepts_recovered" << sep << "density\n";
    for (const auto& r : reports) {
        out << r.method << sep << r.object_id << sep << r.config << sep << r.prompt_tokens << sep
            << r.concepts_recovered << sep << util::format_double(r.density) << "\n";
    }
    return out.str();
}

} // namespace

std::string density_to_csv(const std::vector<DensityReport>& reports) {
    return density_table(reports, ',');
}

void write_density_csv(const std::filesystem::path& path,
                       const std::vector<DensityReport>& reports) {
    util::write_file_atomic(path, density_to_csv(reports));
}

std::string density_to_tsv(const std::vector<DensityReport>& reports) {
    return density_table(reports, '\t');
}

} // namespace tkg
