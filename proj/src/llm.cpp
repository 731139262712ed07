#include "vergen/llm.hpp"

#include "vergen/errors.hpp"
#include "vergen/log.hpp"
#include "vergen/text.hpp"
#include "fs_util.hpp"
#include "http_util.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <thread>

namespace vergen {

using nlohmann::json;

const char* to_string(LlmTag tag) {
    switch (tag) {
        case LlmTag::verify_classify: return "verify_classify";
        case LlmTag::verify_score: return "verify_score";
        case LlmTag::select: return "select";
        case LlmTag::missing_query_passage: return "missing_query_passage";
        case LlmTag::missing_query_question: return "missing_query_question";
        case LlmTag::summarize: return "summarize";
        case LlmTag::generate: return "generate";
    }
    return "unknown";
}

LlmTag llm_tag_from_string(std::string_view name) {
    for (LlmTag tag : {LlmTag::verify_classify, LlmTag::verify_score, LlmTag::select,
                       LlmTag::missing_query_passage, LlmTag::missing_query_question,
                       LlmTag::summarize, LlmTag::generate}) {
        if (name == to_string(tag)) return tag;
    }
    throw Error(ErrorKind::Config, "unknown llm tag: " + std::string(name));
}

namespace {

int rough_token_count(std::string_view s) {
    return static_cast<int>(text::tokenize(s).size());
}

} // namespace

// ---------------------------------------------------------------------------
// ScriptedMockLlm

ScriptedMockLlm::ScriptedMockLlm(ScriptedMockLlm&& other) noexcept
    : ordered_mode_(other.ordered_mode_), responses_(std::move(other.responses_)),
      next_(other.next_), rules_(std::move(other.rules_)), log_(std::move(other.log_)) {}

ScriptedMockLlm ScriptedMockLlm::ordered(std::vector<std::string> responses) {
    ScriptedMockLlm mock;
    mock.ordered_mode_ = true;
    mock.responses_ = std::move(responses);
    return mock;
}

ScriptedMockLlm ScriptedMockLlm::keyed(std::vector<Rule> rules) {
    ScriptedMockLlm mock;
    mock.ordered_mode_ = false;
    mock.rules_ = std::move(rules);
    return mock;
}

ScriptedMockLlm ScriptedMockLlm::from_script_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open mock script: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Config,
                    "malformed mock script " + path.string() + ": " + e.what());
    }
    const std::string mode = doc.value("mode", "keyed");
    if (mode == "ordered") {
        return ordered(doc.at("responses").get<std::vector<std::string>>());
    }
    if (mode != "keyed") {
        throw Error(ErrorKind::Config, "mock script mode must be ordered or keyed");
    }
    std::vector<Rule> rules;
    for (const auto& r : doc.at("rules")) {
        Rule rule;
        if (r.contains("tag")) rule.tag = llm_tag_from_string(r["tag"].get<std::string>());
        rule.contains = r.value("contains", "");
        rule.response = r.at("response").get<std::string>();
        rules.push_back(std::move(rule));
    }
    return keyed(std::move(rules));
}

LlmResponse ScriptedMockLlm::complete(const LlmRequest& request) {
    std::lock_guard<std::mutex> lock(mu_);
    std::string response_text;
    bool matched = false;

    if (ordered_mode_) {
        if (next_ < responses_.size()) {
            response_text = responses_[next_++];
            matched = true;
        }
    } else {
        for (const auto& rule : rules_) {
            if (rule.tag && *rule.tag != request.tag) continue;
            if (!rule.contains.empty() &&
                request.user_content.find(rule.contains) == std::string::npos) {
                continue;
            }
            response_text = rule.response;
            matched = true;
            break;
        }
    }

    if (!matched) {
        throw Error(ErrorKind::Llm, std::string("scripted mock has no response for tag ") +
                                        to_string(request.tag));
    }
    log_.push_back({request.tag, request.user_content, response_text});

    LlmResponse response;
    response.text = response_text;
    response.prompt_tokens =
        rough_token_count(request.system_instruction) + rough_token_count(request.user_content);
    response.completion_tokens = rough_token_count(response_text);
    return response;
}

std::vector<LlmCallRecord> ScriptedMockLlm::call_log() const {
    std::lock_guard<std::mutex> lock(mu_);
    return log_;
}

std::size_t ScriptedMockLlm::call_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return log_.size();
}

std::size_t ScriptedMockLlm::call_count(LlmTag tag) const {
    std::lock_guard<std::mutex> lock(mu_);
    std::size_t count = 0;
    for (const auto& rec : log_) {
        if (rec.tag == tag) ++count;
    }
    return count;
}

// ---------------------------------------------------------------------------
// RemoteLlmClient

struct RemoteLlmClient::Impl {
    RemoteLlmConfig config;
    detail::ParsedUrl url;
    detail::Semaphore in_flight;
    std::string api_key;
    std::atomic<std::size_t> attempts{0};

    explicit Impl(RemoteLlmConfig cfg)
        : config(std::move(cfg)), url(detail::parse_url(config.url)),
          in_flight(config.max_in_flight) {
        if (const char* key = std::getenv(config.api_key_env.c_str())) api_key = key;
    }
};

RemoteLlmClient::RemoteLlmClient(RemoteLlmConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

RemoteLlmClient::~RemoteLlmClient() = default;

std::size_t RemoteLlmClient::attempts() const { return impl_->attempts.load(); }

LlmResponse RemoteLlmClient::complete(const LlmRequest& request) {
    json payload{
        {"model", impl_->config.model},
        {"messages",
         json::array({json{{"role", "system"}, {"content", request.system_instruction}},
                      json{{"role", "user"}, {"content", request.user_content}}})},
        {"temperature", request.temperature},
        {"max_tokens", request.max_tokens},
    };
    const std::string body = payload.dump();

    detail::SemaphoreGuard guard(impl_->in_flight);
    httplib::Client client(impl_->url.base);
    client.set_connection_timeout(0, impl_->config.timeout_ms * 1000LL);
    const long timeout_ms = impl_->config.timeout_ms;
    client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
    httplib::Headers headers;
    if (!impl_->api_key.empty()) headers.emplace("Authorization", "Bearer " + impl_->api_key);

    std::string response_body;
    std::string last_error;
    bool ok = false;
    for (int attempt = 0; attempt < std::max(1, impl_->config.max_retries); ++attempt) {
        if (attempt > 0 && impl_->config.retry_backoff_ms > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(impl_->config.retry_backoff_ms * attempt));
        }
        impl_->attempts.fetch_add(1);
        auto result = client.Post(impl_->url.path, headers, body, "application/json");
        if (!result) {
            last_error = "transport error: " + httplib::to_string(result.error());
            continue;
        }
        if (result->status >= 500) {
            last_error = "server error: HTTP " + std::to_string(result->status);
            continue;
        }
        if (result->status != 200) {
            throw Error(ErrorKind::Llm,
                        "llm endpoint returned HTTP " + std::to_string(result->status) + ": " +
                            result->body);
        }
        response_body = result->body;
        ok = true;
        break;
    }
    if (!ok) {
        throw Error(ErrorKind::Transport, "llm endpoint unreachable after " +
                                              std::to_string(impl_->config.max_retries) +
                                              " attempts: " + last_error);
    }

    json doc;
    try {
        doc = json::parse(response_body);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Llm, std::string("malformed llm response: ") + e.what());
    }

    LlmResponse response;
    try {
        const auto& choice = doc.at("choices").at(0);
        response.text = choice.at("message").at("content").get<std::string>();
        if (choice.contains("finish_reason") && choice["finish_reason"] == "length") {
            response.truncated = true;
            log_warn("llm response truncated (finish_reason=length)");
        }
        if (doc.contains("usage")) {
            response.prompt_tokens = doc["usage"].value("prompt_tokens", 0);
            response.completion_tokens = doc["usage"].value("completion_tokens", 0);
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Llm, std::string("unexpected llm response shape: ") + e.what());
    }
    return response;
}

// ---------------------------------------------------------------------------
// CachingLlmClient

CachingLlmClient::CachingLlmClient(LlmClient& inner, std::string model_name,
                                   std::filesystem::path cache_dir)
    : inner_(inner), model_(std::move(model_name)), dir_(std::move(cache_dir)) {
    if (dir_.empty()) return;
    std::filesystem::create_directories(dir_);
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
        std::ifstream in(entry.path());
        json rec;
        try {
            in >> rec;
        } catch (const json::exception&) {
            log_warn("llm cache: skipping unreadable record " + entry.path().string());
            continue;
        }
        if (!rec.contains("key")) continue;
        LlmResponse response;
        response.text = rec.value("text", "");
        response.prompt_tokens = rec.value("prompt_tokens", 0);
        response.completion_tokens = rec.value("completion_tokens", 0);
        response.truncated = rec.value("truncated", false);
        entries_[rec["key"].get<std::string>()] = std::move(response);
    }
}

std::string CachingLlmClient::cache_key(const LlmRequest& request) const {
    std::string material = std::string(to_string(request.tag)) + "\x1f" +
                           request.system_instruction + "\x1f" + request.user_content + "\x1f" +
                           model_;
    return text::fnv1a64_hex(material);
}

LlmResponse CachingLlmClient::complete(const LlmRequest& request) {
    const std::string key = cache_key(request);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = entries_.find(key);
        if (it != entries_.end()) {
            ++hits_;
            return it->second;
        }
    }
    LlmResponse response = inner_.complete(request);
    {
        std::lock_guard<std::mutex> lock(mu_);
        ++misses_;
        entries_[key] = response;
    }
    if (!dir_.empty()) {
        json rec{{"key", key},
                 {"tag", to_string(request.tag)},
                 {"model", model_},
                 {"text", response.text},
                 {"prompt_tokens", response.prompt_tokens},
                 {"completion_tokens", response.completion_tokens},
                 {"truncated", response.truncated}};
        detail::write_file_atomic(dir_ / (key + ".json"), rec.dump() + "\n");
    }
    return response;
}

std::size_t CachingLlmClient::hits() const {
    std::lock_guard<std::mutex> lock(mu_);
    return hits_;
}

std::size_t CachingLlmClient::misses() const {
    std::lock_guard<std::mutex> lock(mu_);
    return misses_;
}

// ---------------------------------------------------------------------------

LlmResponse CountingLlmClient::complete(const LlmRequest& request) {
    LlmResponse response = inner_.complete(request);
    ++calls_;
    prompt_tokens_ += response.prompt_tokens;
    completion_tokens_ += response.completion_tokens;
    return response;
}

} // namespace vergen
