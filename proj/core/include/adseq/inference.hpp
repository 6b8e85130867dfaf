// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace adseq {

enum class Role { system, user };

enum class FinishReason { stop, length, other };

std::string to_string(Role role);
std::string to_string(FinishReason reason);
FinishReason finish_reason_from_string(const std::string& s);

struct MessagePart {
    enum class Kind { text, image };
    Kind kind = Kind::text;
    std::string text;        // kind == text
    std::string image_b64;   // kind == image
    std::string image_mime;  // kind == image

    static MessagePart make_text(std::string t);
    /// Reads the file and base64-encodes it; mime derived from the extension.
    static MessagePart from_image_file(const std::filesystem::path& path);
};

struct ChatMessage {
    Role role = Role::user;
    std::vector<MessagePart> parts;
};

struct ChatRequest {
    std::string model_id;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;
    int max_tokens = 1024;
    std::optional<int64_t> seed;

    bool has_image_parts() const;
};

struct ChatResponse {
    std::string text;
    FinishReason finish_reason = FinishReason::stop;
    std::string request_hash;
};

/// Key-order-stable serialization used for hashing and caching.
nlohmann::json canonical_request_json(const ChatRequest& request);

/// 64-hex SHA-256 of the canonical serialization.
std::string request_hash(const ChatRequest& request);

struct Endpoint {
    std::string url;          // base URL, e.g. "http://host:8000/v1"
    std::string model_id;
    std::string api_key_env;  // name of the env var holding the key, may be empty
    int retries = 3;          // additional attempts after the first
    int inflight_limit = 4;
    int backoff_ms = 250;     // doubles per retry
    int timeout_s = 120;
    bool multimodal = false;
};

/// A chat-completion transport. Implementations must be callable from
/// multiple threads.
class Backend {
  public:
    virtual ~Backend() = default;
    virtual ChatResponse call(const ChatRequest& request) = 0;
    virtual bool multimodal() const { return true; }
    virtual std::string describe() const = 0;
};

/// Talks the de-facto chat-completions HTTP schema. Retries transient
/// failures (connect errors, 429, 5xx) with exponential backoff and keeps at
/// most `inflight_limit` requests in flight.
class HttpBackend : public Backend {
  public:
    explicit HttpBackend(Endpoint endpoint);
    ~HttpBackend() override;
    ChatResponse call(const ChatRequest& request) override;
    bool multimodal() const override { return endpoint_.multimodal; }
    std::string describe() const override { return "http:" + endpoint_.url; }

  private:
    Endpoint endpoint_;
    struct Limiter;
    std::unique_ptr<Limiter> limiter_;
};

/// Replays responses recorded in `<dir>/responses.json` (request hash ->
/// {text, finish_reason}). Unknown hashes raise MockMissError.
class ScriptedMockBackend : public Backend {
  public:
    explicit ScriptedMockBackend(const std::filesystem::path& fixture_dir);
    ChatResponse call(const ChatRequest& request) override;
    std::string describe() const override { return "scripted-mock"; }

    /// Adds or replaces a scripted response (tests build fixtures with this).
    void script(const std::string& hash, const std::string& text,
                FinishReason reason = FinishReason::stop);
    void save(const std::filesystem::path& fixture_dir) const;

    ScriptedMockBackend() = default;

  private:
    std::map<std::string, ChatResponse> responses_;
};

/// Wraps another backend and records every exchange so it can be replayed by
/// ScriptedMockBackend.
class RecordingBackend : public Backend {
  public:
    RecordingBackend(Backend& inner, std::filesystem::path fixture_dir);
    ~RecordingBackend() override;
    ChatResponse call(const ChatRequest& request) override;
    bool multimodal() const override { return inner_.multimodal(); }
    std::string describe() const override { return "recording(" + inner_.describe() + ")"; }
    void flush() const;

  private:
    Backend& inner_;
    std::filesystem::path fixture_dir_;
    mutable std::mutex mutex_;
    std::map<std::string, ChatResponse> recorded_;
};

/// Validates the request, forwards it to the backend and fills in the
/// request hash.
ChatResponse chat(const ChatRequest& request, Backend& backend);

/// chat() with a content-addressed disk cache (<cache>/<2 hex>/<hash>.json).
/// Corrupt entries count as misses. Writes are atomic (write-then-rename).
ChatResponse cached_chat(const ChatRequest& request, Backend& backend,
                         const std::filesystem::path& cache_dir);

}  // namespace adseq
