#include "vergen/evaluation.hpp"

#include "vergen/errors.hpp"
#include "vergen/parsers.hpp"
#include "vergen/text.hpp"
#include "http_util.hpp"

#include <httplib.h>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <thread>
#include <unordered_set>

namespace vergen {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Judges

bool LexicalJudge::entails(std::string_view premise, std::string_view hypothesis) {
    const auto premise_tokens = text::normalized_tokens(premise);
    std::unordered_set<std::string> vocabulary(premise_tokens.begin(), premise_tokens.end());
    for (const auto& token : text::normalized_tokens(hypothesis)) {
        if (vocabulary.count(token) == 0) return false;
    }
    return true; // empty hypothesis is vacuously entailed
}

struct NliServiceJudge::Impl {
    NliServiceConfig config;
    detail::ParsedUrl url;
    detail::Semaphore in_flight;
    std::mutex mu;
    std::unordered_map<std::string, bool> cache;

    explicit Impl(NliServiceConfig cfg)
        : config(std::move(cfg)), url(detail::parse_url(config.url)),
          in_flight(config.max_in_flight) {}
};

NliServiceJudge::NliServiceJudge(NliServiceConfig config)
    : impl_(std::make_unique<Impl>(std::move(config))) {}

NliServiceJudge::~NliServiceJudge() = default;

bool NliServiceJudge::entails(std::string_view premise, std::string_view hypothesis) {
    const std::string key = text::fnv1a64_hex(std::string(premise) + "\x1f" +
                                              std::string(hypothesis));
    {
        std::lock_guard<std::mutex> lock(impl_->mu);
        auto it = impl_->cache.find(key);
        if (it != impl_->cache.end()) return it->second;
    }

    const json payload{{"premise", std::string(premise)},
                       {"hypothesis", std::string(hypothesis)}};
    const std::string body = payload.dump();

    detail::SemaphoreGuard guard(impl_->in_flight);
    httplib::Client client(impl_->url.base);
    const long timeout_ms = impl_->config.timeout_ms;
    client.set_read_timeout(timeout_ms / 1000, (timeout_ms % 1000) * 1000);

    std::string response_body;
    std::string last_error;
    bool ok = false;
    for (int attempt = 0; attempt < std::max(1, impl_->config.max_retries); ++attempt) {
        if (attempt > 0 && impl_->config.retry_backoff_ms > 0) {
            std::this_thread::sleep_for(
                std::chrono::milliseconds(impl_->config.retry_backoff_ms * attempt));
        }
        auto result = client.Post(impl_->url.path, body, "application/json");
        if (!result) {
            last_error = "transport error: " + httplib::to_string(result.error());
            continue;
        }
        if (result->status >= 500) {
            last_error = "server error: HTTP " + std::to_string(result->status);
            continue;
        }
        if (result->status != 200) {
            throw Error(ErrorKind::Transport,
                        "nli service returned HTTP " + std::to_string(result->status));
        }
        response_body = result->body;
        ok = true;
        break;
    }
    if (!ok) throw Error(ErrorKind::Transport, "nli service unreachable: " + last_error);

    bool entailed = false;
    try {
        json doc = json::parse(response_body);
        if (doc.contains("entailed")) {
            entailed = doc["entailed"].get<bool>();
        } else if (doc.contains("prob")) {
            entailed = doc["prob"].get<double>() >= 0.5;
        } else {
            throw Error(ErrorKind::Transport, "nli response has neither entailed nor prob");
        }
    } catch (const json::exception& e) {
        throw Error(ErrorKind::Transport, std::string("malformed nli response: ") + e.what());
    }

    std::lock_guard<std::mutex> lock(impl_->mu);
    impl_->cache[key] = entailed;
    return entailed;
}

bool LlmEntailmentJudge::entails(std::string_view premise, std::string_view hypothesis) {
    const std::string key =
        text::fnv1a64_hex(std::string(premise) + "\x1f" + std::string(hypothesis));
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }

    LlmRequest request;
    request.tag = LlmTag::verify_classify;
    request.system_instruction =
        "You judge textual entailment. Given a premise and a claim, output [YES] if the "
        "premise fully supports the claim and [NO] otherwise. Output only the bracketed "
        "verdict.";
    request.user_content =
        "Premise: " + std::string(premise) + "\n\nClaim: " + std::string(hypothesis);
    request.max_tokens = 8;
    LlmResponse response = llm_.complete(request);

    bool entailed = false;
    try {
        entailed = parse_binary_verdict(response.text) == Verdict::Yes;
    } catch (const Error&) {
        entailed = false; // unparseable counts as not entailed
    }
    std::lock_guard<std::mutex> lock(mu_);
    cache_[key] = entailed;
    return entailed;
}

// ---------------------------------------------------------------------------
// Correctness metrics

double em_recall(std::string_view answer_text, const AliasSets& short_answers) {
    if (short_answers.empty()) {
        throw Error(ErrorKind::Validation, "em_recall: empty short-answer list");
    }
    const std::string normalized_answer = text::normalize(answer_text);
    std::size_t matched = 0;
    for (const auto& aliases : short_answers) {
        for (const auto& alias : aliases) {
            if (normalized_answer.find(text::normalize(alias)) != std::string::npos) {
                ++matched;
                break;
            }
        }
    }
    return static_cast<double>(matched) / static_cast<double>(short_answers.size());
}

ListQaScores list_qa_metrics(const std::vector<std::string>& predicted, const AliasSets& gold) {
    ListQaScores scores;
    if (gold.empty()) {
        throw Error(ErrorKind::Validation, "list_qa_metrics: empty gold entity list");
    }

    std::vector<std::unordered_set<std::string>> gold_sets;
    gold_sets.reserve(gold.size());
    for (const auto& aliases : gold) {
        std::unordered_set<std::string> set;
        for (const auto& alias : aliases) set.insert(text::normalize(alias));
        gold_sets.push_back(std::move(set));
    }

    std::size_t correct_predictions = 0;
    std::vector<bool> covered(gold_sets.size(), false);
    for (const auto& entity : predicted) {
        bool hit = false;
        for (std::size_t g = 0; g < gold_sets.size(); ++g) {
            if (gold_sets[g].count(entity) > 0) {
                covered[g] = true;
                hit = true;
            }
        }
        if (hit) ++correct_predictions;
    }
    const auto covered_count =
        static_cast<std::size_t>(std::count(covered.begin(), covered.end(), true));

    if (!predicted.empty()) {
        scores.precision =
            static_cast<double>(correct_predictions) / static_cast<double>(predicted.size());
    }
    const double denom = static_cast<double>(std::min<std::size_t>(5, gold.size()));
    scores.recall = std::min(1.0, static_cast<double>(covered_count) / denom);
    if (scores.precision + scores.recall > 0.0) {
        scores.f1 = 2.0 * scores.precision * scores.recall / (scores.precision + scores.recall);
    }
    return scores;
}

std::vector<std::string> predicted_entities(const Answer& answer) {
    std::vector<std::string> out;
    std::unordered_set<std::string> seen;
    for (const auto& statement : answer.statements) {
        std::string normalized = text::normalize(statement.text);
        if (normalized.empty()) continue;
        if (seen.insert(normalized).second) out.push_back(std::move(normalized));
    }
    return out;
}

double claim_recall(std::string_view answer_text, const std::vector<std::string>& claims,
                    EntailmentJudge& judge) {
    if (claims.empty()) {
        throw Error(ErrorKind::Validation, "claim_recall: empty claims list");
    }
    std::size_t entailed = 0;
    for (const auto& claim : claims) {
        if (judge.entails(answer_text, claim)) ++entailed;
    }
    return static_cast<double>(entailed) / static_cast<double>(claims.size());
}

// ---------------------------------------------------------------------------
// Citation quality

namespace {

std::string concat_citations(const std::vector<int>& citations, const DocRefs& docs,
                             int skip_index = 0) {
    std::string premise;
    for (int c : citations) {
        if (c == skip_index) continue;
        premise += docs[static_cast<std::size_t>(c - 1)]->text;
        premise.push_back(' ');
    }
    return premise;
}

} // namespace

double citation_recall(const Answer& answer, const DocRefs& docs, EntailmentJudge& judge) {
    if (answer.statements.empty()) return 0.0;
    std::size_t supported = 0;
    for (const auto& statement : answer.statements) {
        if (statement.citations.empty()) continue;
        if (judge.entails(concat_citations(statement.citations, docs), statement.text)) {
            ++supported;
        }
    }
    return static_cast<double>(supported) / static_cast<double>(answer.statements.size());
}

double citation_precision(const Answer& answer, const DocRefs& docs, EntailmentJudge& judge) {
    std::size_t total = 0;
    std::size_t relevant = 0;
    for (const auto& statement : answer.statements) {
        for (int c : statement.citations) {
            ++total;
            const bool alone =
                judge.entails(docs[static_cast<std::size_t>(c - 1)]->text, statement.text);
            if (alone) {
                ++relevant;
                continue;
            }
            const bool rest_entails =
                judge.entails(concat_citations(statement.citations, docs, c), statement.text);
            if (!rest_entails) ++relevant; // removing c matters, so it is not irrelevant
        }
    }
    if (total == 0) return 0.0;
    return static_cast<double>(relevant) / static_cast<double>(total);
}

double citation_f1(double recall, double precision) {
    if (recall <= 0.0 || precision <= 0.0) return 0.0;
    return 2.0 * recall * precision / (recall + precision);
}

// ---------------------------------------------------------------------------
// Reports

const char* to_string(DatasetMode mode) {
    switch (mode) {
        case DatasetMode::asqa: return "asqa";
        case DatasetMode::qampari: return "qampari";
        case DatasetMode::eli5: return "eli5";
        case DatasetMode::generic: return "generic";
    }
    return "unknown";
}

DatasetMode dataset_mode_from_string(std::string_view name) {
    if (name == "asqa") return DatasetMode::asqa;
    if (name == "qampari") return DatasetMode::qampari;
    if (name == "eli5") return DatasetMode::eli5;
    if (name == "generic") return DatasetMode::generic;
    throw Error(ErrorKind::Config, "unknown dataset mode: " + std::string(name));
}

void EvalReport::aggregate() {
    auto mean100 = [&](auto getter) -> std::optional<double> {
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& example : examples) {
            if (auto value = getter(example)) {
                sum += *value;
                ++count;
            }
        }
        if (count == 0) return std::nullopt;
        return 100.0 * sum / static_cast<double>(count);
    };

    double recall_sum = 0.0, precision_sum = 0.0, f1_sum = 0.0;
    for (const auto& example : examples) {
        recall_sum += example.citation_recall;
        precision_sum += example.citation_precision;
        f1_sum += example.citation_f1;
    }
    const double n = examples.empty() ? 1.0 : static_cast<double>(examples.size());
    cite_recall = 100.0 * recall_sum / n;
    cite_precision = 100.0 * precision_sum / n;
    cite_f1 = 100.0 * f1_sum / n;

    switch (mode) {
        case DatasetMode::asqa:
            correct = mean100([](const ExampleEval& e) { return e.em_recall; });
            break;
        case DatasetMode::qampari:
            correct = mean100([](const ExampleEval& e) { return e.list_f1; });
            list_precision = mean100([](const ExampleEval& e) { return e.list_precision; });
            list_recall = mean100([](const ExampleEval& e) { return e.list_recall; });
            break;
        case DatasetMode::eli5:
            correct = mean100([](const ExampleEval& e) { return e.claim_recall; });
            break;
        case DatasetMode::generic:
            correct.reset();
            break;
    }
}

std::string report_to_jsonl(const EvalReport& report) {
    std::string out;
    for (const auto& example : report.examples) {
        json line{{"type", "example"},
                  {"id", example.id},
                  {"citation_recall", example.citation_recall},
                  {"citation_precision", example.citation_precision},
                  {"citation_f1", example.citation_f1}};
        if (example.em_recall) line["em_recall"] = *example.em_recall;
        if (example.list_precision) line["list_precision"] = *example.list_precision;
        if (example.list_recall) line["list_recall"] = *example.list_recall;
        if (example.list_f1) line["list_f1"] = *example.list_f1;
        if (example.claim_recall) line["claim_recall"] = *example.claim_recall;
        out += line.dump();
        out.push_back('\n');
    }
    json aggregate{{"type", "aggregate"},
                   {"mode", to_string(report.mode)},
                   {"examples", report.examples.size()},
                   {"citation_recall", report.cite_recall},
                   {"citation_precision", report.cite_precision},
                   {"citation_f1", report.cite_f1}};
    if (report.correct) aggregate["correct"] = *report.correct;
    if (report.list_precision) aggregate["list_precision"] = *report.list_precision;
    if (report.list_recall) aggregate["list_recall"] = *report.list_recall;
    out += aggregate.dump();
    out.push_back('\n');
    return out;
}

std::string EvalReport::table() const {
    char line[256];
    std::string correct_str = "   -";
    if (correct) {
        std::snprintf(line, sizeof(line), "%4.1f", *correct);
        correct_str = line;
    }
    std::string out;
    out += "Mode      Correct  Cite-Rec  Cite-Prec  Cite-F1\n";
    std::snprintf(line, sizeof(line), "%-9s %7s  %8.1f  %9.1f  %7.1f\n", to_string(mode),
                  correct_str.c_str(), cite_recall, cite_precision, cite_f1);
    out += line;
    return out;
}

} // namespace vergen
