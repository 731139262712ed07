#pragma once

#include "vergen/corpus.hpp"
#include "vergen/retriever.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace vergen {

struct Bm25Params {
    double k1 = 0.9;
    double b = 0.4;
};

// Okapi BM25 with idf(t) = ln(1 + (N - df + 0.5) / (df + 0.5)). Query terms
// contribute with multiplicity. Indexes title + text of every document.
//
// Scoring is deterministic: per-document contributions are accumulated in
// query-token order, so the inverted index, the exhaustive reference scorer
// and its OpenMP variant produce bit-identical doubles.
class Bm25Index {
public:
    struct Posting {
        std::uint32_t doc;
        std::uint32_t tf;
    };

    Bm25Index() = default;
    static Bm25Index build(const Corpus& corpus, Bm25Params params = {});

    // Top-n by score desc, ties broken by ascending doc id; zero-score
    // documents are never returned.
    RankedList retrieve(const Query& query, int n) const;

    // Dense score vector over all documents (zero where no term matches).
    std::vector<double> score_all(const std::vector<std::string>& query_tokens) const;

    const Bm25Params& params() const noexcept { return params_; }
    std::size_t doc_count() const noexcept { return doc_ids_.size(); }
    double avg_doc_length() const noexcept { return avg_doc_length_; }
    std::uint32_t doc_length(std::size_t i) const { return doc_lengths_[i]; }
    const std::string& doc_id(std::size_t i) const { return doc_ids_[i]; }
    const std::vector<Posting>* postings(const std::string& term) const;
    std::uint64_t corpus_checksum() const noexcept { return corpus_checksum_; }

    // Version-stamped JSON serialization carrying the corpus checksum;
    // load refuses an index built from a different corpus.
    void save(const std::filesystem::path& path) const;
    static Bm25Index load(const std::filesystem::path& path, const Corpus& corpus);

private:
    Bm25Params params_;
    std::vector<std::string> doc_ids_;
    std::vector<std::uint32_t> doc_lengths_;
    double avg_doc_length_ = 0.0;
    std::unordered_map<std::string, std::vector<Posting>> postings_;
    std::uint64_t corpus_checksum_ = 0;
};

// Exhaustive document-at-a-time BM25 over per-document term counts: the
// serial loop is the reference path kept for testing, the OpenMP loop is the
// kernel the benchmark compares against it. Same formula, same results.
class ExhaustiveBm25 {
public:
    static ExhaustiveBm25 build(const Corpus& corpus, Bm25Params params = {});

    std::vector<double> scores(const std::vector<std::string>& query_tokens,
                               bool parallel = false) const;
    RankedList retrieve(const Query& query, int n, bool parallel = false) const;

    std::size_t doc_count() const noexcept { return doc_ids_.size(); }

private:
    Bm25Params params_;
    std::vector<std::string> doc_ids_;
    std::vector<std::uint32_t> doc_lengths_;
    double avg_doc_length_ = 0.0;
    std::vector<std::unordered_map<std::string, std::uint32_t>> doc_tfs_;
    std::unordered_map<std::string, std::uint32_t> df_;
};

// Shared top-n selection: score desc, ties by ascending doc id, zeros dropped.
RankedList top_n_ranked(const std::vector<double>& scores,
                        const std::vector<std::string>& doc_ids, const Query& query, int n);

class Bm25Retriever final : public Retriever {
public:
    explicit Bm25Retriever(Bm25Index index) : index_(std::move(index)) {}

    RankedList retrieve(const Query& query, int n) override { return index_.retrieve(query, n); }

    const Bm25Index& index() const noexcept { return index_; }

private:
    Bm25Index index_;
};

} // namespace vergen
