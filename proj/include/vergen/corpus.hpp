#pragma once

#include <cstdint>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vergen {

class LlmClient;

// One retrievable text unit.
struct Document {
    std::string id;
    std::string title;
    std::string text;
    std::optional<std::string> summary; // LLM-generated condensation
};

using DocRefs = std::vector<const Document*>;

struct CorpusStats {
    std::size_t document_count = 0;
    std::size_t total_tokens = 0;
    double mean_doc_tokens = 0.0;
};

// The document pool. Immutable after load; safe for concurrent reads.
class Corpus {
public:
    // UTF-8 JSON-lines file with fields id, title, text (summary optional).
    static Corpus load_jsonl(const std::filesystem::path& path);
    static Corpus from_documents(std::vector<Document> docs);

    const Document& at(std::string_view id) const;           // throws NotFound
    const Document* find(std::string_view id) const noexcept; // nullptr if absent
    bool contains(std::string_view id) const noexcept { return find(id) != nullptr; }

    const std::vector<Document>& docs() const noexcept { return docs_; }
    std::size_t size() const noexcept { return docs_.size(); }
    const CorpusStats& stats() const noexcept { return stats_; }
    std::uint64_t checksum() const noexcept { return checksum_; }

private:
    Corpus() = default;
    void index_and_stat();

    std::vector<Document> docs_;
    std::unordered_map<std::string, std::size_t> by_id_;
    CorpusStats stats_;
    std::uint64_t checksum_ = 0;
};

// Concurrent summary cache keyed by (doc id, prompt version). Identical keys
// carry identical values under temperature 0, so last-writer-wins is benign.
// With a directory it persists one single-line JSON record per summary.
class SummaryCache {
public:
    SummaryCache() = default; // memory only
    explicit SummaryCache(std::filesystem::path dir);

    std::optional<std::string> lookup(std::string_view doc_id,
                                      std::string_view prompt_hash) const;
    void store(std::string_view doc_id, std::string_view prompt_hash,
               std::string_view summary);
    std::size_t size() const;

private:
    static std::string key(std::string_view doc_id, std::string_view prompt_hash);

    mutable std::mutex mu_;
    std::unordered_map<std::string, std::string> entries_;
    std::filesystem::path dir_;
};

// Returns a copy of doc with summary set, serving repeats from the cache.
// Never stores an empty summary; a summary longer than the text degrades to
// the text itself.
Document summarize_document(const Document& doc, LlmClient& llm, SummaryCache& cache);

} // namespace vergen
