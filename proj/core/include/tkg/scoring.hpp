#pragma once
// Relevance scoring: embeds annotated-edge summaries, computes the cosine
// score per (object, concept, chunk) triple and builds per-concept
// empirical distributions over those scores.

#include "tkg/graph.hpp"
#include "tkg/llm.hpp"

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace tkg {

// Cosine similarity, clamped into [-1, 1].
// Throws Error(dimension_mismatch), Error(zero_vector).
double cosine(std::span<const double> u, std::span<const double> v);

class EmbedderBackend {
public:
    virtual ~EmbedderBackend() = default;
    // Same text must yield the same vector within one backend instance.
    virtual std::vector<double> embed(const std::string& text) = 0;
    virtual int dimension() const = 0;
};

// Deterministic bag-of-words feature hashing into a fixed dimension with
// L2 normalization. Token collisions are acceptable at desk scale.
class HashingEmbedder final : public EmbedderBackend {
public:
    static constexpr int kDefaultDim = 64;
    explicit HashingEmbedder(int dim = kDefaultDim) : dim_(dim) {}
    std::vector<double> embed(const std::string& text) override;
    int dimension() const override { return dim_; }

private:
    int dim_;
};

// Adapts an llm::EmbeddingClient to the EmbedderBackend interface.
class ClientEmbedder final : public EmbedderBackend {
public:
    explicit ClientEmbedder(llm::EmbeddingClient& client) : client_(client) {}
    std::vector<double> embed(const std::string& text) override { return client_.embed(text); }
    int dimension() const override { return client_.dimension(); }

private:
    llm::EmbeddingClient& client_;
};

// Embeds the summary of every annotated edge that has none yet (all of
// them with force=true). Returns the number embedded. Parallel up to
// max_in_flight; results land in the graph single-threaded.
std::size_t embed_edges(TripartiteGraph& g, EmbedderBackend& backend, bool force = false,
                        int max_in_flight = 4);

struct ScoreRecord {
    std::string object_id;
    std::string concept_id;
    std::string chunk_id;
    double w = 0.0;
};

// One record per (o, c, t) where both e_{o,c} and e_{c,t} exist, ordered
// by (concept_id, object_id, chunk_id).
// Throws Error(missing_embedding) naming the offending edge.
std::vector<ScoreRecord> score_all(const TripartiteGraph& g);

struct ConceptDistribution {
    std::string concept_id;
    std::vector<double> samples; // ascending

    std::size_t size() const { return samples.size(); }
};

// Throws Error(empty_samples) on an empty input.
ConceptDistribution build_distribution(const std::string& concept_id,
                                       std::vector<double> scores);

// Groups records by concept. Concepts without records are absent.
std::map<std::string, ConceptDistribution>
build_distributions(const std::vector<ScoreRecord>& records);

// Empirical CDF with "<=" semantics: (count of samples <= w) / n.
// The evaluated score participates in its own distribution.
double empirical_probability(const ConceptDistribution& dist, double w);

// --- artifacts -------------------------------------------------------------

// CSV export: object_id,concept_id,chunk_id,w,p
std::string scores_to_csv(const std::vector<ScoreRecord>& records,
                          const std::map<std::string, ConceptDistribution>& dists);
void write_scores_csv(const std::filesystem::path& path, const std::vector<ScoreRecord>& records,
                      const std::map<std::string, ConceptDistribution>& dists);

// Per-concept summary (n, min, max, deciles) plus the full sample list so
// later stages can rebuild the exact CDF.
std::string distributions_to_json(const std::map<std::string, ConceptDistribution>& dists);
void write_distributions_json(const std::filesystem::path& path,
                              const std::map<std::string, ConceptDistribution>& dists);
std::map<std::string, ConceptDistribution>
load_distributions_json(const std::filesystem::path& path);

} // namespace tkg
