#include "tkg/corpus.hpp"

#include "tkg/errors.hpp"
#include "tkg/util.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace tkg {

namespace {

struct RawSection {
    std::string heading; // empty for the implicit preamble section
    std::string body;
};

// Splits source into sections at depth-1 headings. Lines starting with
// two or more '#' are kept verbatim as section text.
std::vector<RawSection> split_sections(const std::string& source) {
    std::vector<RawSection> sections;
    RawSection current;
    bool have_current = false;

    std::istringstream in(source);
    std::string line;
    while (std::getline(in, line)) {
        std::size_t hashes = 0;
        while (hashes < line.size() && line[hashes] == '#') ++hashes;
        if (hashes == 1) {
            std::string heading = util::trim(line.substr(1));
            if (heading.empty()) {
                raise(Errc::malformed_heading, "heading marker with no text");
            }
            if (have_current) sections.push_back(std::move(current));
            current = RawSection{heading, ""};
            have_current = true;
        } else {
            if (!have_current) {
                current = RawSection{"", ""};
                have_current = true;
            }
            current.body += line;
            current.body += "\n";
        }
    }
    if (have_current) sections.push_back(std::move(current));

    // Drop a whitespace-only preamble so documents that open with a
    // heading do not grow an empty section 0.
    if (!sections.empty() && sections.front().heading.empty() &&
        util::trim(sections.front().body).empty()) {
        sections.erase(sections.begin());
    }
    return sections;
}

// Greedy sentence packing: sentences joined by single spaces, a chunk is
// closed once adding the next sentence would exceed max_chunk_chars.
std::vector<std::string> pack_chunks(const std::string& body, std::size_t max_chunk_chars) {
    std::string normalized = util::collapse_whitespace(body);
    std::vector<std::string> sentences = util::split_sentences(normalized);
    std::vector<std::string> chunks;
    std::string current;
    for (const auto& s : sentences) {
        if (current.empty()) {
            current = s;
        } else if (current.size() + 1 + s.size() <= max_chunk_chars) {
            current += ' ';
            current += s;
        } else {
            chunks.push_back(std::move(current));
            current = s;
        }
    }
    if (!current.empty()) chunks.push_back(std::move(current));
    return chunks;
}

} // namespace

IngestStats ingest_document(TripartiteGraph& g, const std::string& doc_id,
                            const std::string& title, const std::string& source_uri,
                            const std::string& source, const ChunkingConfig& config) {
    if (config.max_chunk_chars < 200) {
        raise(Errc::invalid_config, "max_chunk_chars must be >= 200");
    }
    if (source.empty()) raise(Errc::empty_source, "document \"" + doc_id + "\" is empty");

    std::vector<RawSection> raw = split_sections(source);

    DocumentNode doc;
    doc.doc_id = doc_id;
    doc.title = title;
    doc.source_uri = source_uri;

    struct BuiltSection {
        SectionNode node;
        std::vector<ChunkNode> chunks;
    };
    std::vector<BuiltSection> built;

    int section_ordinal = 0;
    for (const auto& rs : raw) {
        std::vector<std::string> texts = pack_chunks(rs.body, config.max_chunk_chars);
        // Heading-only sections carry no chunks but keep their ordinal slot.
        SectionNode sec;
        sec.section_id = doc_id + ":s" + std::to_string(section_ordinal);
        sec.doc_id = doc_id;
        sec.heading = rs.heading;
        sec.ordinal = section_ordinal;

        BuiltSection bs;
        int chunk_ordinal = 0;
        for (auto& text : texts) {
            ChunkNode ch;
            ch.chunk_id = sec.section_id + ":c" + std::to_string(chunk_ordinal);
            ch.section_id = sec.section_id;
            ch.text = std::move(text);
            ch.ordinal = chunk_ordinal;
            sec.chunk_ids.push_back(ch.chunk_id);
            bs.chunks.push_back(std::move(ch));
            ++chunk_ordinal;
        }
        bs.node = std::move(sec);
        built.push_back(std::move(bs));
        ++section_ordinal;
    }

    // Successor chain across section boundaries, in reading order.
    ChunkNode* prev = nullptr;
    for (auto& bs : built) {
        for (auto& ch : bs.chunks) {
            if (prev) prev->next_chunk_id = ch.chunk_id;
            prev = &ch;
        }
    }

    IngestStats stats;
    stats.doc_id = doc_id;

    for (auto& bs : built) {
        doc.section_ids.push_back(bs.node.section_id);
        ++stats.sections;
        stats.chunks += bs.chunks.size();
    }
    g.upsert(std::move(doc));
    for (auto& bs : built) {
        std::string section_id = bs.node.section_id;
        g.upsert(std::move(bs.node));
        g.insert_edge(EdgeKind::doc_section, doc_id, section_id);
        for (auto& ch : bs.chunks) {
            std::string chunk_id = ch.chunk_id;
            g.upsert(std::move(ch));
            g.insert_edge(EdgeKind::section_chunk, section_id, chunk_id);
        }
    }
    // chunk_next edges need both endpoints present, so a second pass.
    for (const auto& bs : built) {
        const SectionNode* sec = g.section(bs.node.section_id);
        for (const auto& cid : sec->chunk_ids) {
            const ChunkNode* ch = g.chunk(cid);
            if (ch->next_chunk_id) {
                g.insert_edge(EdgeKind::chunk_next, cid, *ch->next_chunk_id);
            }
        }
    }
    return stats;
}

std::vector<std::string> document_order(const TripartiteGraph& g,
                                        const std::vector<std::string>& chunk_ids) {
    std::set<std::string> wanted;
    for (const auto& id : chunk_ids) {
        if (!g.chunk(id)) raise(Errc::unknown_chunk, id);
        wanted.insert(id);
    }
    if (wanted.empty()) return {};

    // Chain position per chunk, walking successor links from each head.
    std::map<std::string, std::pair<std::string, std::size_t>> position; // chunk -> (doc, pos)
    std::set<std::string> has_pred;
    for (const auto& [id, ch] : g.chunks()) {
        if (ch.next_chunk_id) has_pred.insert(*ch.next_chunk_id);
    }
    for (const auto& [id, ch] : g.chunks()) {
        if (has_pred.count(id)) continue;
        const SectionNode* sec = g.section(ch.section_id);
        std::string doc_id = sec ? sec->doc_id : "";
        std::size_t pos = 0;
        const ChunkNode* cur = &ch;
        while (cur) {
            position[cur->chunk_id] = {doc_id, pos++};
            cur = cur->next_chunk_id ? g.chunk(*cur->next_chunk_id) : nullptr;
        }
    }

    std::vector<std::string> out(wanted.begin(), wanted.end());
    std::sort(out.begin(), out.end(), [&](const std::string& x, const std::string& y) {
        const auto& px = position.at(x);
        const auto& py = position.at(y);
        if (px.first != py.first) return px.first < py.first;
        if (px.second != py.second) return px.second < py.second;
        return x < y;
    });
    return out;
}

} // namespace tkg
