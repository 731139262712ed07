#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vergen {

enum class LlmTag {
    verify_classify,
    verify_score,
    select,
    missing_query_passage,
    missing_query_question,
    summarize,
    generate,
};

const char* to_string(LlmTag tag);
LlmTag llm_tag_from_string(std::string_view name);

struct LlmRequest {
    LlmTag tag = LlmTag::generate;
    std::string system_instruction;
    std::string user_content;
    double temperature = 0.0;
    int max_tokens = 1024;
};

struct LlmResponse {
    std::string text;
    int prompt_tokens = 0;
    int completion_tokens = 0;
    bool truncated = false;
};

struct LlmCallRecord {
    LlmTag tag;
    std::string user_content;
    std::string response;
};

class LlmClient {
public:
    virtual ~LlmClient() = default;
    virtual LlmResponse complete(const LlmRequest& request) = 0;
};

// Deterministic scripted stand-in for a real model. Two modes:
//   ordered — responses consumed front to back (single consumer);
//   keyed   — rules matched by tag plus an optional user-content substring,
//             first match wins; safe for concurrent use.
// Every served request is logged; an unscripted request is an error.
class ScriptedMockLlm final : public LlmClient {
public:
    struct Rule {
        std::optional<LlmTag> tag;
        std::string contains; // empty = match any content
        std::string response;
    };

    ScriptedMockLlm(ScriptedMockLlm&& other) noexcept;

    static ScriptedMockLlm ordered(std::vector<std::string> responses);
    static ScriptedMockLlm keyed(std::vector<Rule> rules);
    // JSON script: {"mode":"ordered","responses":[...]} or
    // {"mode":"keyed","rules":[{"tag":...,"contains":...,"response":...}]}
    static ScriptedMockLlm from_script_file(const std::filesystem::path& path);

    LlmResponse complete(const LlmRequest& request) override;

    std::vector<LlmCallRecord> call_log() const;
    std::size_t call_count() const;
    std::size_t call_count(LlmTag tag) const;

private:
    ScriptedMockLlm() = default;

    mutable std::mutex mu_;
    bool ordered_mode_ = false;
    std::vector<std::string> responses_;
    std::size_t next_ = 0;
    std::vector<Rule> rules_;
    std::vector<LlmCallRecord> log_;
};

struct RemoteLlmConfig {
    std::string url;   // full chat-completions URL, e.g. http://host:8000/v1/chat/completions
    std::string model;
    std::string api_key_env = "VERGEN_LLM_API_KEY";
    int timeout_ms = 60000;
    int max_retries = 3;
    int retry_backoff_ms = 200;
    int max_in_flight = 4;
};

// Chat-completion HTTP client. Retries transient failures (transport errors
// and 5xx) up to max_retries attempts; bounds concurrent requests.
class RemoteLlmClient final : public LlmClient {
public:
    explicit RemoteLlmClient(RemoteLlmConfig config);
    ~RemoteLlmClient() override;

    LlmResponse complete(const LlmRequest& request) override;

    std::size_t attempts() const; // total HTTP attempts, for tests

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Response cache keyed by hash(tag, system_instruction, user_content, model);
// valid because pipelines run at temperature 0. Optionally persisted under a
// run directory so a rerun issues zero remote calls.
class CachingLlmClient final : public LlmClient {
public:
    CachingLlmClient(LlmClient& inner, std::string model_name,
                     std::filesystem::path cache_dir = {});

    LlmResponse complete(const LlmRequest& request) override;

    std::size_t hits() const;
    std::size_t misses() const;

private:
    std::string cache_key(const LlmRequest& request) const;

    LlmClient& inner_;
    std::string model_;
    std::filesystem::path dir_;
    mutable std::mutex mu_;
    std::unordered_map<std::string, LlmResponse> entries_;
    std::size_t hits_ = 0;
    std::size_t misses_ = 0;
};

// Counts calls and token totals passing through to an inner client.
class CountingLlmClient final : public LlmClient {
public:
    explicit CountingLlmClient(LlmClient& inner) : inner_(inner) {}

    LlmResponse complete(const LlmRequest& request) override;

    int calls() const { return calls_; }
    long prompt_tokens() const { return prompt_tokens_; }
    long completion_tokens() const { return completion_tokens_; }

private:
    LlmClient& inner_;
    int calls_ = 0;
    long prompt_tokens_ = 0;
    long completion_tokens_ = 0;
};

} // namespace vergen
