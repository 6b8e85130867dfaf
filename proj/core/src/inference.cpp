// SPDX-License-Identifier: Apache-2.0

#include "adseq/inference.hpp"

#include <httplib.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "adseq/errors.hpp"
#include "adseq/hash.hpp"

namespace adseq {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Role role) { return role == Role::system ? "system" : "user"; }

std::string to_string(FinishReason reason) {
    switch (reason) {
        case FinishReason::stop: return "stop";
        case FinishReason::length: return "length";
        case FinishReason::other: return "other";
    }
    return "other";
}

FinishReason finish_reason_from_string(const std::string& s) {
    if (s == "stop") return FinishReason::stop;
    if (s == "length") return FinishReason::length;
    return FinishReason::other;
}

MessagePart MessagePart::make_text(std::string t) {
    MessagePart part;
    part.kind = Kind::text;
    part.text = std::move(t);
    return part;
}

MessagePart MessagePart::from_image_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("cannot read frame image: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    MessagePart part;
    part.kind = Kind::image;
    part.image_b64 = base64_encode(buf.str());
    const std::string ext = path.extension().string();
    if (ext == ".jpg" || ext == ".jpeg") {
        part.image_mime = "image/jpeg";
    } else if (ext == ".webp") {
        part.image_mime = "image/webp";
    } else {
        part.image_mime = "image/png";
    }
    return part;
}

bool ChatRequest::has_image_parts() const {
    for (const auto& message : messages) {
        for (const auto& part : message.parts) {
            if (part.kind == MessagePart::Kind::image) return true;
        }
    }
    return false;
}

nlohmann::json canonical_request_json(const ChatRequest& request) {
    // nlohmann objects keep keys sorted, which makes the dump canonical.
    json j;
    j["model"] = request.model_id;
    j["temperature"] = request.temperature;
    j["max_tokens"] = request.max_tokens;
    if (request.seed) j["seed"] = *request.seed;
    json messages = json::array();
    for (const auto& message : request.messages) {
        json parts = json::array();
        for (const auto& part : message.parts) {
            if (part.kind == MessagePart::Kind::text) {
                parts.push_back({{"type", "text"}, {"text", part.text}});
            } else {
                parts.push_back(
                    {{"type", "image"}, {"mime", part.image_mime}, {"data", part.image_b64}});
            }
        }
        messages.push_back({{"role", to_string(message.role)}, {"parts", std::move(parts)}});
    }
    j["messages"] = std::move(messages);
    return j;
}

std::string request_hash(const ChatRequest& request) {
    return sha256_hex(canonical_request_json(request).dump());
}

// ---------------------------------------------------------------------------
// HttpBackend

struct HttpBackend::Limiter {
    std::mutex mutex;
    std::condition_variable cv;
    int in_flight = 0;
};

HttpBackend::HttpBackend(Endpoint endpoint)
    : endpoint_(std::move(endpoint)), limiter_(std::make_unique<Limiter>()) {}

HttpBackend::~HttpBackend() = default;

namespace {

struct ParsedUrl {
    std::string origin;  // scheme://host[:port]
    std::string prefix;  // path prefix, may be empty
};

ParsedUrl split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    size_t path_start = url.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
    if (path_start == std::string::npos) return {url, ""};
    std::string prefix = url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {url.substr(0, path_start), prefix};
}

json wire_request_json(const ChatRequest& request) {
    json j;
    j["model"] = request.model_id;
    j["temperature"] = request.temperature;
    j["max_tokens"] = request.max_tokens;
    if (request.seed) j["seed"] = *request.seed;
    json messages = json::array();
    for (const auto& message : request.messages) {
        json m;
        m["role"] = to_string(message.role);
        if (message.parts.size() == 1 && message.parts[0].kind == MessagePart::Kind::text) {
            m["content"] = message.parts[0].text;
        } else {
            json content = json::array();
            for (const auto& part : message.parts) {
                if (part.kind == MessagePart::Kind::text) {
                    content.push_back({{"type", "text"}, {"text", part.text}});
                } else {
                    content.push_back(
                        {{"type", "image_url"},
                         {"image_url",
                          {{"url", "data:" + part.image_mime + ";base64," + part.image_b64}}}});
                }
            }
            m["content"] = std::move(content);
        }
        messages.push_back(std::move(m));
    }
    j["messages"] = std::move(messages);
    return j;
}

std::string response_text(const json& j) {
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (content.is_string()) return content.get<std::string>();
    std::string out;
    for (const auto& part : content) {
        if (part.contains("text")) out += part.at("text").get<std::string>();
    }
    return out;
}

}  // namespace

ChatResponse HttpBackend::call(const ChatRequest& request) {
    const std::string hash = request_hash(request);
    const ParsedUrl url = split_url(endpoint_.url);

    {
        std::unique_lock lock(limiter_->mutex);
        limiter_->cv.wait(lock,
                          [&] { return limiter_->in_flight < endpoint_.inflight_limit; });
        ++limiter_->in_flight;
    }
    struct Release {
        Limiter* limiter;
        ~Release() {
            std::lock_guard lock(limiter->mutex);
            --limiter->in_flight;
            limiter->cv.notify_one();
        }
    } release{limiter_.get()};

    httplib::Client client(url.origin);
    client.set_connection_timeout(endpoint_.timeout_s, 0);
    client.set_read_timeout(endpoint_.timeout_s, 0);
    httplib::Headers headers;
    if (!endpoint_.api_key_env.empty()) {
        if (const char* key = std::getenv(endpoint_.api_key_env.c_str()); key && *key) {
            headers.emplace("Authorization", std::string("Bearer ") + key);
        }
    }

    const std::string body = wire_request_json(request).dump();
    const std::string path = url.prefix + "/chat/completions";
    std::string last_error;

    for (int attempt = 0; attempt <= endpoint_.retries; ++attempt) {
        if (attempt > 0) {
            const auto delay = std::chrono::milliseconds(endpoint_.backoff_ms << (attempt - 1));
            std::this_thread::sleep_for(delay);
        }
        auto result = client.Post(path, headers, body, "application/json");
        if (!result) {
            last_error = "transport failure: " + httplib::to_string(result.error());
            continue;
        }
        if (result->status == 429 || result->status >= 500) {
            last_error = "status " + std::to_string(result->status);
            continue;
        }
        if (result->status < 200 || result->status >= 300) {
            throw EndpointError("endpoint " + endpoint_.url + " returned status " +
                                    std::to_string(result->status) + ": " + result->body,
                                result->status);
        }
        try {
            json j = json::parse(result->body);
            ChatResponse response;
            response.text = response_text(j);
            response.finish_reason = finish_reason_from_string(
                j.at("choices").at(0).value("finish_reason", "other"));
            response.request_hash = hash;
            return response;
        } catch (const json::exception& e) {
            throw EndpointError("endpoint " + endpoint_.url +
                                    " returned an unparseable body: " + e.what(),
                                result->status);
        }
    }
    throw TransportError("request " + hash + " to " + endpoint_.url +
                             " failed after " + std::to_string(endpoint_.retries + 1) +
                             " attempts (" + last_error + ")",
                         hash);
}

// ---------------------------------------------------------------------------
// ScriptedMockBackend

ScriptedMockBackend::ScriptedMockBackend(const fs::path& fixture_dir) {
    const fs::path file = fixture_dir / "responses.json";
    std::ifstream in(file);
    if (!in) throw LoadError("cannot open mock fixtures: " + file.string());
    json j = json::parse(in);
    for (const auto& [hash, entry] : j.items()) {
        ChatResponse response;
        response.text = entry.at("text").get<std::string>();
        response.finish_reason =
            finish_reason_from_string(entry.value("finish_reason", "stop"));
        response.request_hash = hash;
        responses_[hash] = std::move(response);
    }
}

ChatResponse ScriptedMockBackend::call(const ChatRequest& request) {
    const std::string hash = request_hash(request);
    auto it = responses_.find(hash);
    if (it == responses_.end()) {
        throw MockMissError("no scripted response for hash " + hash, hash);
    }
    ChatResponse response = it->second;
    response.request_hash = hash;
    return response;
}

void ScriptedMockBackend::script(const std::string& hash, const std::string& text,
                                 FinishReason reason) {
    responses_[hash] = ChatResponse{text, reason, hash};
}

void ScriptedMockBackend::save(const fs::path& fixture_dir) const {
    fs::create_directories(fixture_dir);
    json j = json::object();
    for (const auto& [hash, response] : responses_) {
        j[hash] = {{"text", response.text}, {"finish_reason", to_string(response.finish_reason)}};
    }
    std::ofstream out(fixture_dir / "responses.json", std::ios::trunc);
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// RecordingBackend

RecordingBackend::RecordingBackend(Backend& inner, fs::path fixture_dir)
    : inner_(inner), fixture_dir_(std::move(fixture_dir)) {}

RecordingBackend::~RecordingBackend() {
    try {
        flush();
    } catch (...) {
        // flushing on destruction is best effort
    }
}

ChatResponse RecordingBackend::call(const ChatRequest& request) {
    ChatResponse response = inner_.call(request);
    response.request_hash = request_hash(request);
    std::lock_guard lock(mutex_);
    recorded_[response.request_hash] = response;
    return response;
}

void RecordingBackend::flush() const {
    std::lock_guard lock(mutex_);
    fs::create_directories(fixture_dir_);
    json j = json::object();
    for (const auto& [hash, response] : recorded_) {
        j[hash] = {{"text", response.text}, {"finish_reason", to_string(response.finish_reason)}};
    }
    std::ofstream out(fixture_dir_ / "responses.json", std::ios::trunc);
    out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// chat / cached_chat

ChatResponse chat(const ChatRequest& request, Backend& backend) {
    bool has_user = false;
    for (const auto& message : request.messages) {
        if (message.role == Role::user) has_user = true;
    }
    if (!has_user) throw ConfigError("chat request has no user message");
    if (request.has_image_parts() && !backend.multimodal()) {
        throw ConfigError("image parts sent to a non-multimodal endpoint (" + backend.describe() +
                          ")");
    }
    ChatResponse response = backend.call(request);
    if (response.request_hash.empty()) response.request_hash = request_hash(request);
    return response;
}

ChatResponse cached_chat(const ChatRequest& request, Backend& backend,
                         const fs::path& cache_dir) {
    const std::string hash = request_hash(request);
    const fs::path entry_dir = cache_dir / hash.substr(0, 2);
    const fs::path entry = entry_dir / (hash + ".json");

    if (fs::exists(entry)) {
        try {
            std::ifstream in(entry);
            json j = json::parse(in);
            ChatResponse response;
            response.text = j.at("text").get<std::string>();
            response.finish_reason =
                finish_reason_from_string(j.value("finish_reason", "stop"));
            response.request_hash = hash;
            return response;
        } catch (const std::exception& e) {
            std::cerr << "warning: corrupt cache entry " << entry.string() << " (" << e.what()
                      << "), refetching\n";
        }
    }

    ChatResponse response = chat(request, backend);
    fs::create_directories(entry_dir);
    static std::atomic<uint64_t> tmp_counter{0};
    const fs::path tmp =
        entry.string() + ".tmp" + std::to_string(tmp_counter.fetch_add(1));
    {
        std::ofstream out(tmp, std::ios::trunc);
        json j = {{"text", response.text},
                  {"finish_reason", to_string(response.finish_reason)},
                  {"request_hash", hash}};
        out << j.dump() << '\n';
    }
    fs::rename(tmp, entry);
    return response;
}

}  // namespace adseq
