#include "tkg/scoring.hpp"

#include "tkg/errors.hpp"
#include "tkg/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

namespace tkg {

using nlohmann::json;

double cosine(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        raise(Errc::dimension_mismatch,
              std::to_string(u.size()) + " vs " + std::to_string(v.size()));
    }
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0) raise(Errc::zero_vector, "cosine of a zero vector is undefined");
    double c = dot / (std::sqrt(nu) * std::sqrt(nv));
    return std::clamp(c, -1.0, 1.0);
}

std::vector<double> HashingEmbedder::embed(const std::string& text) {
    std::vector<double> acc(static_cast<std::size_t>(dim_), 0.0);
    std::string token;
    auto flush = [&] {
        if (token.empty()) return;
        std::uint64_t h = util::fnv1a64(token);
        std::size_t idx = static_cast<std::size_t>(h % static_cast<std::uint64_t>(dim_));
        double sign = ((h >> 32) & 1u) ? 1.0 : -1.0;
        acc[idx] += sign;
        token.clear();
    };
    for (char c : text) {
        unsigned char u = static_cast<unsigned char>(c);
        if (std::isalnum(u)) {
            token.push_back(static_cast<char>(std::tolower(u)));
        } else {
            flush();
        }
    }
    flush();

    double norm = 0.0;
    for (double x : acc) norm += x * x;
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& x : acc) x /= norm;
    }
    return acc;
}

std::size_t embed_edges(TripartiteGraph& g, EmbedderBackend& backend, bool force,
                        int max_in_flight) {
    std::vector<std::string> todo;
    for (const auto& [id, e] : g.edges()) {
        if (!edge_kind_annotated(e.kind)) continue;
        if (e.embedding && !force) continue;
        todo.push_back(id);
    }
    std::vector<std::vector<double>> results(todo.size());
    util::parallel_for(todo.size(), max_in_flight, [&](std::size_t i) {
        results[i] = backend.embed(g.edge(todo[i])->summary);
    });
    for (std::size_t i = 0; i < todo.size(); ++i) {
        g.set_edge_embedding(todo[i], std::move(results[i]));
    }
    return todo.size();
}

std::vector<ScoreRecord> score_all(const TripartiteGraph& g) {
    // Per concept: objects with e_{o,c} and chunks with e_{c,t}.
    std::map<std::string, std::vector<const Edge*>> object_edges; // concept -> e_{o,c}
    std::map<std::string, std::vector<const Edge*>> chunk_edges;  // concept -> e_{c,t}
    for (const auto& [id, e] : g.edges()) {
        if (e.kind == EdgeKind::object_concept) object_edges[e.b].push_back(&e);
        else if (e.kind == EdgeKind::concept_chunk) chunk_edges[e.a].push_back(&e);
    }

    auto need_embedding = [](const Edge* e) -> const std::vector<double>& {
        if (!e->embedding) raise(Errc::missing_embedding, "edge " + e->edge_id);
        return *e->embedding;
    };

    std::vector<ScoreRecord> out;
    for (const auto& [concept_id, oc_edges] : object_edges) {
        auto ct_it = chunk_edges.find(concept_id);
        if (ct_it == chunk_edges.end()) continue;
        for (const Edge* oc : oc_edges) {
            const auto& eo = need_embedding(oc);
            for (const Edge* ct : ct_it->second) {
                const auto& et = need_embedding(ct);
                ScoreRecord rec;
                rec.object_id = oc->a;
                rec.concept_id = concept_id;
                rec.chunk_id = ct->b;
                rec.w = cosine(eo, et);
                out.push_back(std::move(rec));
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const ScoreRecord& x, const ScoreRecord& y) {
        if (x.concept_id != y.concept_id) return x.concept_id < y.concept_id;
        if (x.object_id != y.object_id) return x.object_id < y.object_id;
        return x.chunk_id < y.chunk_id;
    });
    return out;
}

ConceptDistribution build_distribution(const std::string& concept_id,
                                       std::vector<double> scores) {
    if (scores.empty()) raise(Errc::empty_samples, "concept " + concept_id);
    std::sort(scores.begin(), scores.end());
    return ConceptDistribution{concept_id, std::move(scores)};
}

std::map<std::string, ConceptDistribution>
build_distributions(const std::vector<ScoreRecord>& records) {
    std::map<std::string, std::vector<double>> grouped;
    for (const auto& r : records) grouped[r.concept_id].push_back(r.w);
    std::map<std::string, ConceptDistribution> out;
    for (auto& [cid, scores] : grouped) {
        out.emplace(cid, build_distribution(cid, std::move(scores)));
    }
    return out;
}

double empirical_probability(const ConceptDistribution& dist, double w) {
    if (dist.samples.empty()) raise(Errc::empty_samples, "concept " + dist.concept_id);
    auto it = std::upper_bound(dist.samples.begin(), dist.samples.end(), w);
    auto count = static_cast<double>(std::distance(dist.samples.begin(), it));
    return count / static_cast<double>(dist.samples.size());
}

// --- artifacts -------------------------------------------------------------

std::string scores_to_csv(const std::vector<ScoreRecord>& records,
                          const std::map<std::string, ConceptDistribution>& dists) {
    std::ostringstream out;
    out << "object_id,concept_id,chunk_id,w,p\n";
    for (const auto& r : records) {
        auto it = dists.find(r.concept_id);
        double p = it == dists.end() ? 0.0 : empirical_probability(it->second, r.w);
        out << r.object_id << ',' << r.concept_id << ',' << r.chunk_id << ','
            << util::format_double(r.w) << ',' << util::format_double(p) << '\n';
    }
    return out.str();
}

void write_scores_csv(const std::filesystem::path& path, const std::vector<ScoreRecord>& records,
                      const std::map<std::string, ConceptDistribution>& dists) {
    util::write_file_atomic(path, scores_to_csv(records, dists));
}

std::string distributions_to_json(const std::map<std::string, ConceptDistribution>& dists) {
    json doc = json::object();
    for (const auto& [cid, dist] : dists) {
        const auto& s = dist.samples;
        if (s.empty()) continue;
        json deciles = json::array();
        for (int d = 0; d <= 10; ++d) {
            std::size_t idx = std::min(s.size() - 1, (s.size() - 1) * d / 10);
            deciles.push_back(s[idx]);
        }
        doc[cid] = json{{"n", s.size()},
                        {"min", s.front()},
                        {"max", s.back()},
                        {"deciles", deciles},
                        {"samples", s}};
    }
    return doc.dump(2) + "\n";
}

void write_distributions_json(const std::filesystem::path& path,
                              const std::map<std::string, ConceptDistribution>& dists) {
    util::write_file_atomic(path, distributions_to_json(dists));
}

std::map<std::string, ConceptDistribution>
load_distributions_json(const std::filesystem::path& path) {
    json doc;
    try {
        doc = json::parse(util::read_file(path));
    } catch (const json::parse_error& e) {
        raise(Errc::corrupt_record, "distributions file: " + std::string(e.what()));
    }
    std::map<std::string, ConceptDistribution> out;
    for (const auto& [cid, j] : doc.items()) {
        std::vector<double> samples;
        try {
            for (const auto& x : j.at("samples")) samples.push_back(x.get<double>());
        } catch (const json::exception& e) {
            raise(Errc::corrupt_record, "distributions file: " + std::string(e.what()));
        }
        out.emplace(cid, ConceptDistribution{cid, std::move(samples)});
    }
    return out;
}

} // namespace tkg
