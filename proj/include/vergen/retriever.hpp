#pragma once

#include "vergen/corpus.hpp"

#include <memory>
#include <string>
#include <vector>

namespace vergen {

enum class QueryStyle {
    original_question,
    missing_question,
    missing_passage,
    hyde_passage,
};

const char* to_string(QueryStyle style);

struct Query {
    std::string text;
    QueryStyle style = QueryStyle::original_question;
    int iteration = 1;
};

struct RankedEntry {
    std::string doc_id;
    double score = 0.0;
};

struct RankedList {
    std::vector<RankedEntry> entries;
    Query query;

    // non-increasing scores, unique doc ids; throws Validation otherwise
    void validate() const;
};

class Retriever {
public:
    virtual ~Retriever() = default;
    // Top-n candidates for the query; n >= 1. Fewer than n entries only when
    // fewer documents score.
    virtual RankedList retrieve(const Query& query, int n) = 0;
};

struct EmbeddingServiceConfig {
    std::string url; // e.g. http://host:9300/retrieve
    std::string auth_token;
    int timeout_ms = 30000;
    int max_retries = 3;
    int retry_backoff_ms = 200;
    int max_in_flight = 4;
};

// Client for a remote nearest-neighbor service. Protocol:
//   request  {"query": string, "top_n": integer}
//   response {"hits": [{"id": string, "score": number}]}
// Returned ids are validated against the corpus; an unknown id or an
// unsorted score list is a hard error.
class EmbeddingServiceRetriever final : public Retriever {
public:
    EmbeddingServiceRetriever(EmbeddingServiceConfig config, const Corpus& corpus);
    ~EmbeddingServiceRetriever() override;

    RankedList retrieve(const Query& query, int n) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace vergen
