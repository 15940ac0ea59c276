#pragma once
// Chat-completion and embedding clients speaking the de-facto OpenAI HTTP
// shape, plus offline record/replay doubles. Retry policy and bounded
// concurrency live here, not in callers.
//
// No implementation in this module performs network IO unless the http
// backend is explicitly selected.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace tkg::llm {

struct BackendConfig {
    std::string base_url;          // e.g. "https://api.openai.com/v1"
    std::string api_key;           // env-sourced; never serialized or logged
    std::string model_chat;
    std::string model_embed;
    double timeout_s = 30.0;
    int max_retries = 3;           // attempts per request
    int max_in_flight = 4;
    int backoff_base_ms = 250;     // doubles per retry
};

// Applies LLM_API_KEY / LLM_BASE_URL environment overrides.
BackendConfig apply_env_overrides(BackendConfig config);

class ChatClient {
public:
    virtual ~ChatClient() = default;
    // Returns the assistant message body. Must be safe for concurrent calls.
    virtual std::string complete(const std::string& system_text,
                                 const std::string& user_text) = 0;
};

class EmbeddingClient {
public:
    virtual ~EmbeddingClient() = default;
    virtual std::vector<double> embed(const std::string& text) = 0;
    // 0 until the dimension is known (first reply fixes it).
    virtual int dimension() const = 0;
};

// --- http ----------------------------------------------------------------

// POST {base_url}/chat/completions. Retries transport failures, 429 and
// 5xx with exponential backoff up to config.max_retries attempts.
std::unique_ptr<ChatClient> make_http_chat_client(const BackendConfig& config);

// POST {base_url}/embeddings. Raises Error(dimension_drift) if the
// endpoint changes its vector dimension mid-run.
std::unique_ptr<EmbeddingClient> make_http_embedding_client(const BackendConfig& config);

// --- record / replay -------------------------------------------------------

// Fixture file: JSON lines {"digest": hex, "kind": "chat"|"embed", ...}.
// The digest keys the canonical request content, so replays are exact.
std::string chat_request_digest(const std::string& model, const std::string& system_text,
                                const std::string& user_text);
std::string embed_request_digest(const std::string& model, const std::string& text);

class ReplayStore {
public:
    explicit ReplayStore(std::filesystem::path path);

    // Loads all records; missing file yields an empty store (record mode).
    void load();
    std::optional<std::string> chat_reply(const std::string& digest) const;
    std::optional<std::vector<double>> embedding(const std::string& digest) const;
    void record_chat(const std::string& digest, const std::string& reply);
    void record_embedding(const std::string& digest, const std::vector<double>& vec);
    void flush() const; // rewrites the fixture file, sorted by digest

private:
    std::filesystem::path path_;
    std::map<std::string, std::string> chat_;
    std::map<std::string, std::vector<double>> embed_;
    mutable std::mutex mutex_;
};

// Replays recorded replies; a request that was never recorded raises
// Error(replay_miss). Performs no network IO.
std::unique_ptr<ChatClient> make_replay_chat_client(std::shared_ptr<ReplayStore> store,
                                                    const std::string& model);
std::unique_ptr<EmbeddingClient> make_replay_embedding_client(std::shared_ptr<ReplayStore> store,
                                                              const std::string& model);

// Wraps an inner client, recording every reply into the store.
std::unique_ptr<ChatClient> make_recording_chat_client(std::unique_ptr<ChatClient> inner,
                                                       std::shared_ptr<ReplayStore> store,
                                                       const std::string& model);
std::unique_ptr<EmbeddingClient>
make_recording_embedding_client(std::unique_ptr<EmbeddingClient> inner,
                                std::shared_ptr<ReplayStore> store, const std::string& model);

// --- test doubles ----------------------------------------------------------

// Fixed reply table keyed by exact user text; unknown input yields "NONE".
std::unique_ptr<ChatClient>
make_scripted_chat_client(std::map<std::string, std::string> replies);

} // namespace tkg::llm
