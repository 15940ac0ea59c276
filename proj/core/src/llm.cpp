#include "tkg/llm.hpp"

#include "tkg/errors.hpp"
#include "tkg/util.hpp"

#include <httplib.h>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <sstream>
#include <thread>

namespace tkg::llm {

using nlohmann::json;

BackendConfig apply_env_overrides(BackendConfig config) {
    if (const char* key = std::getenv("LLM_API_KEY")) config.api_key = key;
    if (const char* url = std::getenv("LLM_BASE_URL")) config.base_url = url;
    return config;
}

namespace {

bool retryable_status(int status) {
    return status == 429 || status >= 500;
}

// Splits "https://host:port/v1" into (scheme://host:port, /v1).
std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
    auto scheme_end = base_url.find("://");
    std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
    auto path_start = base_url.find('/', host_start);
    if (path_start == std::string::npos) return {base_url, ""};
    std::string path = base_url.substr(path_start);
    if (path == "/") path = "";
    return {base_url.substr(0, path_start), path};
}

class HttpEndpoint {
public:
    explicit HttpEndpoint(const BackendConfig& config) : config_(config) {
        if (config_.base_url.empty()) {
            raise(Errc::invalid_config, "http backend requires base_url");
        }
    }

    // POSTs the body with retry/backoff; returns the parsed JSON reply.
    json post_json(const std::string& endpoint, const json& body) {
        auto [host, prefix] = split_base_url(config_.base_url);
        std::string payload = body.dump();
        std::string last_error;
        for (int attempt = 0; attempt < std::max(1, config_.max_retries); ++attempt) {
            if (attempt > 0) {
                auto delay = std::chrono::milliseconds(
                    static_cast<std::int64_t>(config_.backoff_base_ms) * (1ll << (attempt - 1)));
                std::this_thread::sleep_for(delay);
            }
            httplib::Client client(host);
            client.set_connection_timeout(std::chrono::duration<double>(config_.timeout_s));
            client.set_read_timeout(std::chrono::duration<double>(config_.timeout_s));
            httplib::Headers headers;
            if (!config_.api_key.empty()) {
                headers.emplace("Authorization", "Bearer " + config_.api_key);
            }
            auto res = client.Post(prefix + endpoint, headers, payload, "application/json");
            if (!res) {
                last_error = "transport failure: " + httplib::to_string(res.error());
                continue;
            }
            if (res->status == 200) {
                try {
                    return json::parse(res->body);
                } catch (const json::parse_error& e) {
                    raise(Errc::malformed_body, std::string("reply is not JSON: ") + e.what());
                }
            }
            if (retryable_status(res->status)) {
                last_error = "http status " + std::to_string(res->status);
                continue;
            }
            raise(Errc::http_status,
                  "status " + std::to_string(res->status) + " from " + endpoint);
        }
        raise(Errc::transport, last_error + " after " +
                                   std::to_string(std::max(1, config_.max_retries)) + " attempts");
    }

private:
    BackendConfig config_;
};

class HttpChatClient final : public ChatClient {
public:
    explicit HttpChatClient(const BackendConfig& config) : endpoint_(config), config_(config) {}

    std::string complete(const std::string& system_text, const std::string& user_text) override {
        json body;
        body["model"] = config_.model_chat;
        body["temperature"] = 0;
        body["messages"] = json::array({json{{"role", "system"}, {"content", system_text}},
                                        json{{"role", "user"}, {"content", user_text}}});
        json reply = endpoint_.post_json("/chat/completions", body);
        try {
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            raise(Errc::malformed_body, std::string("unexpected chat reply shape: ") + e.what());
        }
    }

private:
    HttpEndpoint endpoint_;
    BackendConfig config_;
};

class HttpEmbeddingClient final : public EmbeddingClient {
public:
    explicit HttpEmbeddingClient(const BackendConfig& config)
        : endpoint_(config), config_(config) {}

    std::vector<double> embed(const std::string& text) override {
        json body;
        body["model"] = config_.model_embed;
        body["input"] = text;
        json reply = endpoint_.post_json("/embeddings", body);
        std::vector<double> vec;
        try {
            for (const auto& x : reply.at("data").at(0).at("embedding")) {
                vec.push_back(x.get<double>());
            }
        } catch (const json::exception& e) {
            raise(Errc::malformed_body, std::string("unexpected embedding reply shape: ") + e.what());
        }
        std::lock_guard lock(mutex_);
        if (dimension_ == 0) {
            dimension_ = static_cast<int>(vec.size());
        } else if (dimension_ != static_cast<int>(vec.size())) {
            raise(Errc::dimension_drift,
                  "endpoint changed dimension from " + std::to_string(dimension_) + " to " +
                      std::to_string(vec.size()));
        }
        return vec;
    }

    int dimension() const override {
        std::lock_guard lock(mutex_);
        return dimension_;
    }

private:
    HttpEndpoint endpoint_;
    BackendConfig config_;
    mutable std::mutex mutex_;
    int dimension_ = 0;
};

} // namespace

std::unique_ptr<ChatClient> make_http_chat_client(const BackendConfig& config) {
    return std::make_unique<HttpChatClient>(config);
}

std::unique_ptr<EmbeddingClient> make_http_embedding_client(const BackendConfig& config) {
    return std::make_unique<HttpEmbeddingClient>(config);
}

// --- record / replay -------------------------------------------------------

std::string chat_request_digest(const std::string& model, const std::string& system_text,
                                const std::string& user_text) {
    json j{{"kind", "chat"}, {"model", model}, {"system", system_text}, {"user", user_text}};
    return util::to_hex(util::fnv1a64(j.dump()));
}

std::string embed_request_digest(const std::string& model, const std::string& text) {
    json j{{"kind", "embed"}, {"model", model}, {"text", text}};
    return util::to_hex(util::fnv1a64(j.dump()));
}

ReplayStore::ReplayStore(std::filesystem::path path) : path_(std::move(path)) {}

void ReplayStore::load() {
    std::lock_guard lock(mutex_);
    chat_.clear();
    embed_.clear();
    if (!std::filesystem::exists(path_)) return;
    std::istringstream in(util::read_file(path_));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (util::trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
            std::string digest = j.at("digest").get<std::string>();
            std::string kind = j.at("kind").get<std::string>();
            if (kind == "chat") {
                chat_[digest] = j.at("reply").get<std::string>();
            } else if (kind == "embed") {
                std::vector<double> vec;
                for (const auto& x : j.at("embedding")) vec.push_back(x.get<double>());
                embed_[digest] = std::move(vec);
            } else {
                raise(Errc::corrupt_record, "unknown replay kind \"" + kind + "\"");
            }
        } catch (const json::exception& e) {
            raise(Errc::corrupt_record,
                  "replay line " + std::to_string(lineno) + ": " + e.what());
        }
    }
}

std::optional<std::string> ReplayStore::chat_reply(const std::string& digest) const {
    std::lock_guard lock(mutex_);
    auto it = chat_.find(digest);
    return it == chat_.end() ? std::nullopt : std::optional(it->second);
}

std::optional<std::vector<double>> ReplayStore::embedding(const std::string& digest) const {
    std::lock_guard lock(mutex_);
    auto it = embed_.find(digest);
    return it == embed_.end() ? std::nullopt : std::optional(it->second);
}

void ReplayStore::record_chat(const std::string& digest, const std::string& reply) {
    std::lock_guard lock(mutex_);
    chat_[digest] = reply;
}

void ReplayStore::record_embedding(const std::string& digest, const std::vector<double>& vec) {
    std::lock_guard lock(mutex_);
    embed_[digest] = vec;
}

void ReplayStore::flush() const {
    std::lock_guard lock(mutex_);
    std::ostringstream out;
    for (const auto& [digest, reply] : chat_) {
        json j{{"digest", digest}, {"kind", "chat"}, {"reply", reply}};
        out << j.dump() << "\n";
    }
    for (const auto& [digest, vec] : embed_) {
        json j{{"digest", digest}, {"kind", "embed"}, {"embedding", vec}};
        out << j.dump() << "\n";
    }
    util::write_file_atomic(path_, out.str());
}

namespace {

class ReplayChatClient final : public ChatClient {
public:
    ReplayChatClient(std::shared_ptr<ReplayStore> store, std::string model)
        : store_(std::move(store)), model_(std::move(model)) {}

    std::string complete(const std::string& system_text, const std::string& user_text) override {
        std::string digest = chat_request_digest(model_, system_text, user_text);
        auto reply = store_->chat_reply(digest);
        if (!reply) raise(Errc::replay_miss, "no recorded chat reply for digest " + digest);
        return *reply;
    }

private:
    std::shared_ptr<ReplayStore> store_;
    std::string model_;
};

class ReplayEmbeddingClient final : public EmbeddingClient {
public:
    ReplayEmbeddingClient(std::shared_ptr<ReplayStore> store, std::string model)
        : store_(std::move(store)), model_(std::move(model)) {}

    std::vector<double> embed(const std::string& text) override {
        std::string digest = embed_request_digest(model_, text);
        auto vec = store_->embedding(digest);
        if (!vec) raise(Errc::replay_miss, "no recorded embedding for digest " + digest);
        {
            std::lock_guard lock(mutex_);
            if (dimension_ == 0) dimension_ = static_cast<int>(vec->size());
        }
        return *vec;
    }

    int dimension() const override {
        std::lock_guard lock(mutex_);
        return dimension_;
    }

private:
    std::shared_ptr<ReplayStore> store_;
    std::string model_;
    mutable std::mutex mutex_;
    int dimension_ = 0;
};

class RecordingChatClient final : public ChatClient {
public:
    RecordingChatClient(std::unique_ptr<ChatClient> inner, std::shared_ptr<ReplayStore> store,
                        std::string model)
        : inner_(std::move(inner)), store_(std::move(store)), model_(std::move(model)) {}

    std::string complete(const std::string& system_text, const std::string& user_text) override {
        std::string reply = inner_->complete(system_text, user_text);
        store_->record_chat(chat_request_digest(model_, system_text, user_text), reply);
        return reply;
    }

private:
    std::unique_ptr<ChatClient> inner_;
    std::shared_ptr<ReplayStore> store_;
    std::string model_;
};

class RecordingEmbeddingClient final : public EmbeddingClient {
public:
    RecordingEmbeddingClient(std::unique_ptr<EmbeddingClient> inner,
                             std::shared_ptr<ReplayStore> store, std::string model)
        : inner_(std::move(inner)), store_(std::move(store)), model_(std::move(model)) {}

    std::vector<double> embed(const std::string& text) override {
        std::vector<double> vec = inner_->embed(text);
        store_->record_embedding(embed_request_digest(model_, text), vec);
        return vec;
    }

    int dimension() const override { return inner_->dimension(); }

private:
    std::unique_ptr<EmbeddingClient> inner_;
    std::shared_ptr<ReplayStore> store_;
    std::string model_;
};

class ScriptedChatClient final : public ChatClient {
public:
    explicit ScriptedChatClient(std::map<std::string, std::string> replies)
        : replies_(std::move(replies)) {}

    std::string complete(const std::string&, const std::string& user_text) override {
        auto it = replies_.find(user_text);
        return it == replies_.end() ? "NONE" : it->second;
    }

private:
    std::map<std::string, std::string> replies_;
};

} // namespace

std::unique_ptr<ChatClient> make_replay_chat_client(std::shared_ptr<ReplayStore> store,
                                                    const std::string& model) {
    return std::make_unique<ReplayChatClient>(std::move(store), model);
}

std::unique_ptr<EmbeddingClient> make_replay_embedding_client(std::shared_ptr<ReplayStore> store,
                                                              const std::string& model) {
    return std::make_unique<ReplayEmbeddingClient>(std::move(store), model);
}

std::unique_ptr<ChatClient> make_recording_chat_client(std::unique_ptr<ChatClient> inner,
                                                       std::shared_ptr<ReplayStore> store,
                                                       const std::string& model) {
    return std::make_unique<RecordingChatClient>(std::move(inner), std::move(store), model);
}

std::unique_ptr<EmbeddingClient>
make_recording_embedding_client(std::unique_ptr<EmbeddingClient> inner,
                                std::shared_ptr<ReplayStore> store, const std::string& model) {
    return std::make_unique<RecordingEmbeddingClient>(std::move(inner), std::move(store), model);
}

std::unique_ptr<ChatClient> make_scripted_chat_client(std::map<std::string, std::string> replies) {
    return std::make_unique<ScriptedChatClient>(std::move(replies));
}

} // namespace tkg::llm
