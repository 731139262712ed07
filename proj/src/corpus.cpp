#include "vergen/corpus.hpp"

#include "vergen/errors.hpp"
#include "vergen/llm.hpp"
#include "vergen/log.hpp"
#include "vergen/prompts.hpp"
#include "vergen/text.hpp"
#include "fs_util.hpp"

#include <json.hpp>

#include <fstream>


namespace vergen {

using nlohmann::json;

namespace {

Document parse_record(const std::string& line, std::size_t line_no) {
    json rec;
    try {
        rec = json::parse(line);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Corpus, "corpus line " + std::to_string(line_no) +
                                           ": malformed record: " + e.what());
    }
    if (!rec.is_object()) {
        throw Error(ErrorKind::Corpus,
                    "corpus line " + std::to_string(line_no) + ": record is not an object");
    }
    auto field = [&](const char* name) -> std::string {
        if (!rec.contains(name) || !rec[name].is_string()) {
            throw Error(ErrorKind::Corpus, "corpus line " + std::to_string(line_no) +
                                               ": missing string field \"" + name + "\"");
        }
        return rec[name].get<std::string>();
    };
    Document doc;
    doc.id = field("id");
    doc.text = field("text");
    doc.title = rec.contains("title") && rec["title"].is_string()
                    ? rec["title"].get<std::string>()
                    : std::string{};
    if (doc.id.empty()) {
        throw Error(ErrorKind::Corpus, "corpus line " + std::to_string(line_no) + ": empty id");
    }
    if (doc.text.empty()) {
        throw Error(ErrorKind::Corpus,
                    "corpus line " + std::to_string(line_no) + ": empty text for id " + doc.id);
    }
    if (rec.contains("summary") && rec["summary"].is_string()) {
        auto summary = rec["summary"].get<std::string>();
        if (summary.empty() || summary.size() > doc.text.size()) {
            throw Error(ErrorKind::Corpus, "corpus line " + std::to_string(line_no) +
                                               ": invalid summary for id " + doc.id);
        }
        doc.summary = std::move(summary);
    }
    return doc;
}

} // namespace

Corpus Corpus::load_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot open file: " + path.string());

    Corpus corpus;

    // streamed: one record per line, content-checksummed as we go
    std::uint64_t checksum = 0xcbf29ce484222325ull;
    auto mix = [&checksum](std::string_view chunk) {
        for (unsigned char c : chunk) {
            checksum ^= c;
            checksum *= 0x100000001b3ull;
        }
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        mix(line);
        mix("\n");
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        corpus.docs_.push_back(parse_record(line, line_no));
    }
    corpus.checksum_ = checksum;
    if (corpus.docs_.empty()) {
        throw Error(ErrorKind::Corpus, "empty corpus: " + path.string());
    }
    corpus.index_and_stat();
    return corpus;
}

Corpus Corpus::from_documents(std::vector<Document> docs) {
    if (docs.empty()) throw Error(ErrorKind::Corpus, "empty corpus");
    Corpus corpus;
    corpus.docs_ = std::move(docs);
    std::string digest;
    for (const auto& d : corpus.docs_) {
        digest += d.id;
        digest.push_back('\x1f');
        digest += d.title;
        digest.push_back('\x1f');
        digest += d.text;
        digest.push_back('\n');
    }
    corpus.checksum_ = text::fnv1a64(digest);
    corpus.index_and_stat();
    return corpus;
}

void Corpus::index_and_stat() {
    by_id_.reserve(docs_.size());
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        auto [it, inserted] = by_id_.emplace(docs_[i].id, i);
        if (!inserted) {
            throw Error(ErrorKind::Corpus, "duplicate document id: " + docs_[i].id);
        }
    }

    const auto n = static_cast<std::int64_t>(docs_.size());
    std::size_t total = 0;
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : total)
    for (std::int64_t i = 0; i < n; ++i) {
        total += text::tokenize(docs_[static_cast<std::size_t>(i)].text).size();
    }
    stats_.document_count = docs_.size();
    stats_.total_tokens = total;
    stats_.mean_doc_tokens =
        docs_.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(docs_.size());
}

const Document& Corpus::at(std::string_view id) const {
    const Document* doc = find(id);
    if (doc == nullptr) {
        throw Error(ErrorKind::NotFound, "unknown document id: " + std::string(id));
    }
    return *doc;
}

const Document* Corpus::find(std::string_view id) const noexcept {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &docs_[it->second];
}

// ---------------------------------------------------------------------------
// SummaryCache

SummaryCache::SummaryCache(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".json") continue;
        std::ifstream in(entry.path());
        json rec;
        try {
            in >> rec;
        } catch (const json::exception&) {
            log_warn("summary cache: skipping unreadable record " + entry.path().string());
            continue;
        }
        if (rec.contains("doc_id") && rec.contains("prompt_hash") && rec.contains("summary")) {
            entries_[key(rec["doc_id"].get<std::string>(),
                         rec["prompt_hash"].get<std::string>())] =
                rec["summary"].get<std::string>();
        }
    }
}

std::string SummaryCache::key(std::string_view doc_id, std::string_view prompt_hash) {
    std::string k(doc_id);
    k.push_back('\x1f');
    k += prompt_hash;
    return k;
}

std::optional<std::string> SummaryCache::lookup(std::string_view doc_id,
                                                std::string_view prompt_hash) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = entries_.find(key(doc_id, prompt_hash));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void SummaryCache::store(std::string_view doc_id, std::string_view prompt_hash,
                         std::string_view summary) {
    const std::string k = key(doc_id, prompt_hash);
    {
        std::lock_guard<std::mutex> lock(mu_);
        entries_[k] = std::string(summary);
    }
    if (dir_.empty()) return;
    json rec{{"doc_id", std::string(doc_id)},
             {"prompt_hash", std::string(prompt_hash)},
             {"summary", std::string(summary)}};
    detail::write_file_atomic(dir_ / (text::fnv1a64_hex(k) + ".json"), rec.dump() + "\n");
}

std::size_t SummaryCache::size() const {
    std::lock_guard<std::mutex> lock(mu_);
    return entries_.size();
}

// ---------------------------------------------------------------------------

Document summarize_document(const Document& doc, LlmClient& llm, SummaryCache& cache) {
    if (doc.text.empty()) {
        throw Error(ErrorKind::Validation, "summarize_document: empty text for id " + doc.id);
    }
    const std::string version = summarize_prompt_hash();
    Document out = doc;
    if (auto cached = cache.lookup(doc.id, version)) {
        out.summary = std::move(*cached);
        return out;
    }

    PromptSlots slots;
    slots.documents = {{doc.title, doc.text}};
    RenderedPrompt prompt = render_prompt(LlmTag::summarize, slots);

    LlmRequest request;
    request.tag = LlmTag::summarize;
    request.system_instruction = std::move(prompt.system_instruction);
    request.user_content = std::move(prompt.user_content);
    LlmResponse response = llm.complete(request);

    std::string summary = response.text;
    while (!summary.empty() && (summary.back() == '\n' || summary.back() == ' ')) {
        summary.pop_back();
    }
    if (summary.empty()) {
        throw Error(ErrorKind::Llm, "summarize_document: empty summary for id " + doc.id);
    }
    if (summary.size() > doc.text.size()) {
        log_warn("summary longer than text for id " + doc.id + "; using text");
        summary = doc.text;
    }
    cache.store(doc.id, version, summary);
    out.summary = std::move(summary);
    return out;
}

} // namespace vergen
