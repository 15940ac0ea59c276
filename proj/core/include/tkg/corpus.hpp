#pragma once
// Corpus ingestion: plain-text documents with "#" headings become
// document -> section -> chunk structure with a successor chain over the
// chunks in reading order.

#include "tkg/graph.hpp"

#include <string>
#include <vector>

namespace tkg {

struct ChunkingConfig {
    // Greedy sentence packing never exceeds this unless a single sentence
    // is longer by itself (sentences are never split).
    std::size_t max_chunk_chars = 1200;
};

struct IngestStats {
    std::string doc_id;
    std::size_t sections = 0;
    std::size_t chunks = 0;
};

// Splits `source` at depth-1 "#" headings into sections, packs each
// section's sentences into chunks and links all chunks of the document
// into one successor chain. Text before the first heading lands in an
// untitled section. Deeper headings ("##", ...) stay inside section text.
// Throws Error(empty_source), Error(malformed_heading), Error(invalid_config).
IngestStats ingest_document(TripartiteGraph& g, const std::string& doc_id,
                            const std::string& title, const std::string& source_uri,
                            const std::string& source, const ChunkingConfig& config);

// Returns the given chunk ids sorted by (doc_id, successor-chain position).
// Duplicates collapse; the result is a total order and stable across runs.
// Throws Error(unknown_chunk).
std::vector<std::string> document_order(const TripartiteGraph& g,
                                        const std::vector<std::string>& chunk_ids);

} // namespace tkg
