#include "vergen/bm25.hpp"

#include "vergen/errors.hpp"
#include "vergen/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>


namespace vergen {

using nlohmann::json;

namespace {

constexpr int kIndexFormatVersion = 1;

double idf_term(std::size_t doc_count, std::size_t df) {
    return std::log(1.0 + (static_cast<double>(doc_count) - static_cast<double>(df) + 0.5) /
                              (static_cast<double>(df) + 0.5));
}

double term_weight(double idf, double tf, double doc_len, double avg_len,
                   const Bm25Params& p) {
    return idf * tf * (p.k1 + 1.0) /
           (tf + p.k1 * (1.0 - p.b + p.b * doc_len / avg_len));
}

std::vector<std::string> index_tokens(const Document& doc) {
    return text::tokenize(doc.title + " " + doc.text);
}

} // namespace

RankedList top_n_ranked(const std::vector<double>& scores,
                        const std::vector<std::string>& doc_ids, const Query& query, int n) {
    std::vector<std::size_t> scored;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] > 0.0) scored.push_back(i);
    }
    std::sort(scored.begin(), scored.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return doc_ids[a] < doc_ids[b];
    });
    if (scored.size() > static_cast<std::size_t>(n)) scored.resize(static_cast<std::size_t>(n));

    RankedList out;
    out.query = query;
    out.entries.reserve(scored.size());
    for (std::size_t i : scored) out.entries.push_back({doc_ids[i], scores[i]});
    return out;
}

// ---------------------------------------------------------------------------
// Bm25Index

Bm25Index Bm25Index::build(const Corpus& corpus, Bm25Params params) {
    if (corpus.size() == 0) throw Error(ErrorKind::Corpus, "cannot index an empty corpus");

    Bm25Index index;
    index.params_ = params;
    index.corpus_checksum_ = corpus.checksum();

    const auto n = static_cast<std::int64_t>(corpus.size());
    index.doc_ids_.resize(corpus.size());
    index.doc_lengths_.resize(corpus.size());

    // Per-document term counts, tokenized in parallel; the posting merge
    // below stays serial so postings are ordered by document index.
    std::vector<std::vector<std::pair<std::string, std::uint32_t>>> counts(corpus.size());
#pragma omp parallel for schedule(dynamic, 32)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const auto tokens = index_tokens(corpus.docs()[idx]);
        std::unordered_map<std::string, std::uint32_t> tf;
        for (const auto& t : tokens) ++tf[t];
        std::vector<std::pair<std::string, std::uint32_t>> sorted(tf.begin(), tf.end());
        std::sort(sorted.begin(), sorted.end());
        counts[idx] = std::move(sorted);
        index.doc_ids_[idx] = corpus.docs()[idx].id;
        index.doc_lengths_[idx] = static_cast<std::uint32_t>(tokens.size());
    }

    std::size_t total_len = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        total_len += index.doc_lengths_[i];
        for (const auto& [term, tf] : counts[i]) {
            index.postings_[term].push_back({static_cast<std::uint32_t>(i), tf});
        }
    }
    index.avg_doc_length_ =
        corpus.size() == 0 ? 0.0 : static_cast<double>(total_len) / static_cast<double>(corpus.size());
    return index;
}

const std::vector<Bm25Index::Posting>* Bm25Index::postings(const std::string& term) const {
    auto it = postings_.find(term);
    return it == postings_.end() ? nullptr : &it->second;
}

std::vector<double> Bm25Index::score_all(const std::vector<std::string>& query_tokens) const {
    std::vector<double> scores(doc_ids_.size(), 0.0);
    for (const auto& term : query_tokens) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const double idf = idf_term(doc_ids_.size(), it->second.size());
        for (const auto& posting : it->second) {
            scores[posting.doc] += term_weight(idf, posting.tf, doc_lengths_[posting.doc],
                                               avg_doc_length_, params_);
        }
    }
    return scores;
}

RankedList Bm25Index::retrieve(const Query& query, int n) const {
    if (n < 1) throw Error(ErrorKind::Validation, "retrieve: n must be >= 1");
    return top_n_ranked(score_all(text::tokenize(query.text)), doc_ids_, query, n);
}

void Bm25Index::save(const std::filesystem::path& path) const {
    json postings = json::object();
    for (const auto& [term, list] : postings_) {
        json entries = json::array();
        for (const auto& p : list) entries.push_back({p.doc, p.tf});
        postings[term] = std::move(entries);
    }
    json doc = {
        {"format_version", kIndexFormatVersion},
        {"corpus_checksum", corpus_checksum_},
        {"k1", params_.k1},
        {"b", params_.b},
        {"avg_doc_length", avg_doc_length_},
        {"doc_ids", doc_ids_},
        {"doc_lengths", doc_lengths_},
        {"postings", std::move(postings)},
    };
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error(ErrorKind::Io, "cannot write index: " + path.string());
    out << doc.dump() << "\n";
}

Bm25Index Bm25Index::load(const std::filesystem::path& path, const Corpus& corpus) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open index: " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Io, "unreadable index " + path.string() + ": " + e.what());
    }
    if (doc.value("format_version", -1) != kIndexFormatVersion) {
        throw Error(ErrorKind::Config, "unsupported index format version in " + path.string());
    }
    const auto checksum = doc.at("corpus_checksum").get<std::uint64_t>();
    if (checksum != corpus.checksum()) {
        throw Error(ErrorKind::Config,
                    "stale index: corpus checksum mismatch for " + path.string() +
                        " (reindex with `vergen index`)");
    }

    Bm25Index index;
    index.corpus_checksum_ = checksum;
    index.params_.k1 = doc.at("k1").get<double>();
    index.params_.b = doc.at("b").get<double>();
    index.avg_doc_length_ = doc.at("avg_doc_length").get<double>();
    index.doc_ids_ = doc.at("doc_ids").get<std::vector<std::string>>();
    index.doc_lengths_ = doc.at("doc_lengths").get<std::vector<std::uint32_t>>();
    for (const auto& [term, entries] : doc.at("postings").items()) {
        auto& list = index.postings_[term];
        list.reserve(entries.size());
        for (const auto& e : entries) {
            list.push_back({e.at(0).get<std::uint32_t>(), e.at(1).get<std::uint32_t>()});
        }
    }
    for (const auto& id : index.doc_ids_) {
        if (!corpus.contains(id)) {
            throw Error(ErrorKind::Config, "index references unknown document id: " + id);
        }
    }
    return index;
}

// ---------------------------------------------------------------------------
// ExhaustiveBm25

ExhaustiveBm25 ExhaustiveBm25::build(const Corpus& corpus, Bm25Params params) {
    if (corpus.size() == 0) throw Error(ErrorKind::Corpus, "cannot score an empty corpus");

    ExhaustiveBm25 scorer;
    scorer.params_ = params;
    const auto n = static_cast<std::int64_t>(corpus.size());
    scorer.doc_ids_.resize(corpus.size());
    scorer.doc_lengths_.resize(corpus.size());
    scorer.doc_tfs_.resize(corpus.size());

#pragma omp parallel for schedule(dynamic, 32)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const auto tokens = index_tokens(corpus.docs()[idx]);
        std::unordered_map<std::string, std::uint32_t> tf;
        for (const auto& t : tokens) ++tf[t];
        scorer.doc_tfs_[idx] = std::move(tf);
        scorer.doc_ids_[idx] = corpus.docs()[idx].id;
        scorer.doc_lengths_[idx] = static_cast<std::uint32_t>(tokens.size());
    }

    std::size_t total_len = 0;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        total_len += scorer.doc_lengths_[i];
        for (const auto& [term, tf] : scorer.doc_tfs_[i]) ++scorer.df_[term];
    }
    scorer.avg_doc_length_ = static_cast<double>(total_len) / static_cast<double>(corpus.size());
    return scorer;
}

std::vector<double> ExhaustiveBm25::scores(const std::vector<std::string>& query_tokens,
                                           bool parallel) const {
    std::vector<double> idf(query_tokens.size(), 0.0);
    for (std::size_t t = 0; t < query_tokens.size(); ++t) {
        auto it = df_.find(query_tokens[t]);
        if (it != df_.end()) idf[t] = idf_term(doc_ids_.size(), it->second);
    }

    std::vector<double> out(doc_ids_.size(), 0.0);
    const auto n = static_cast<std::int64_t>(doc_ids_.size());

    auto score_doc = [&](std::size_t d) {
        double score = 0.0;
        const auto& tfs = doc_tfs_[d];
        for (std::size_t t = 0; t < query_tokens.size(); ++t) {
            if (idf[t] == 0.0) continue;
            auto it = tfs.find(query_tokens[t]);
            if (it == tfs.end()) continue;
            score += term_weight(idf[t], it->second, doc_lengths_[d], avg_doc_length_, params_);
        }
        return score;
    };

    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) {
            out[static_cast<std::size_t>(i)] = score_doc(static_cast<std::size_t>(i));
        }
    } else {
        for (std::int64_t i = 0; i < n; ++i) {
            out[static_cast<std::size_t>(i)] = score_doc(static_cast<std::size_t>(i));
        }
    }
    return out;
}

RankedList ExhaustiveBm25::retrieve(const Query& query, int n, bool parallel) const {
    if (n < 1) throw Error(ErrorKind::Validation, "retrieve: n must be >= 1");
    return top_n_ranked(scores(text::tokenize(query.text), parallel), doc_ids_, query, n);
}

} // namespace vergen
