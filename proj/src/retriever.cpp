#include "vergen/retriever.hpp"

#include "vergen/errors.hpp"
#include "http_util.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <limits>
#include <thread>
#include <unordered_set>

namespace vergen {

using nlohmann::json;

const char* to_string(QueryStyle style) {
    switch (style) {
        case QueryStyle::original_question: return "original_question";
        case QueryStyle::missing_question: return "missing_question";
        case QueryStyle::missing_passage: return "missing_passage";
        case QueryStyle::hyde_passage: return "hyde_passage";
    }
    return "unknown";
}

void RankedList::validate() const {
    std::unordered_set<std::string_view> seen;
    double previous = std::numeric_limits<double>::infinity();
    for (const auto& entry : entries) {
        if (entry.score > previous) {
            throw Error(ErrorKind::Validation,
                        "ranked list scores increase at doc id " + entry.doc_id);
        }
        previous = entry.score;
        if (!seen.insert(entry.doc_id).second) {
            throw Error(ErrorKind::Validation, "ranked list repeats doc id " + entry.doc_id);
        }
    }
}

// ---------------------------------------------------------------------------

struct EmbeddingServiceRetriever::Impl {
    EmbeddingServiceConfig config;
    const Corpus& corpus;
    detail::ParsedUrl url;
    detail::Semaphore in_flight;

    Impl(EmbeddingServiceConfig cfg, const Corpus& c)
        : config(std::move(cfg)), corpus(c), url(detail::parse_url(config.url)),
          in_flight(config.max_in_flight) {}
};

EmbeddingServiceRetriever::EmbeddingServiceRetriever(EmbeddingServiceConfig config,
                                                     const Corpus& corpus)
    : impl_(std::make_unique<Impl>(std::move(config), corpus)) {}

EmbeddingServiceRetriever::~EmbeddingServiceRetriever() = default;

RankedList EmbeddingServiceRetriever::retrieve(const Query& query, int n) {
    if (n < 1) throw Error(ErrorKind::Validation, "retrieve: n must be >= 1");

    const json payload{{"query", query.text}, {"top_n", n}};
    const std::string body = payload.dump();

    detail::SemaphoreGuard guard(impl_->in_flight);
    httplib::Client client(impl_->url.base);
    client.set_connection_timeout(0, impl_->config.timeout_ms * 1000LL);
    const long timeout_ms = impl_->config.timeout_ms;
    client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);
    httplib::Headers headers;
    if (!impl_->config.auth_token.empty()) {
        headers.emplace("Authorization", "Bearer " + impl_->config.auth_token);
    }

    std::string response_body;
    std::string last_error;
    bool ok = false;
    for (int attempt = 0; attempt < std::max(1, impl_->config.max_retries); ++attempt) {
        if (attempt > 0 && impl_->config.retry_backoff_ms > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(impl_->config.retry_backoff_ms * attempt));
        }
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
            throw Error(ErrorKind::Transport, "embedding service returned HTTP " +
                                                   std::to_string(result->status));
        }
        response_body = result->body;
        ok = true;
        break;
    }
    if (!ok) {
        throw Error(ErrorKind::Transport, "embedding service unreachable: " + last_error);
    }

    json doc;
    try {
        doc = json::parse(response_body);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Transport, std::string("malformed embedding response: ") + e.what());
    }
    if (!doc.contains("hits") || !doc["hits"].is_array()) {
        throw Error(ErrorKind::Transport, "embedding response missing \"hits\" array");
    }

    RankedList out;
    out.query = query;
    for (const auto& hit : doc["hits"]) {
        RankedEntry entry;
        entry.doc_id = hit.at("id").get<std::string>();
        entry.score = hit.at("score").get<double>();
        if (!impl_->corpus.contains(entry.doc_id)) {
            throw Error(ErrorKind::Validation,
                        "embedding service returned unknown doc id: " + entry.doc_id);
        }
        out.entries.push_back(std::move(entry));
    }
    if (out.entries.size() > static_cast<std::size_t>(n)) {
        out.entries.resize(static_cast<std::size_t>(n));
    }
    out.validate();
    return out;
}

} // namespace vergen
