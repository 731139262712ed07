#pragma once

#include "vergen/corpus.hpp"
#include "vergen/generation.hpp"
#include "vergen/llm.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace vergen {

using AliasSets = std::vector<std::vector<std::string>>;

// Premise/hypothesis entailment oracle; documents are always the premise.
class EntailmentJudge {
public:
    virtual ~EntailmentJudge() = default;
    virtual bool entails(std::string_view premise, std::string_view hypothesis) = 0;
};

// Deterministic stand-in for an NLI service: true iff every normalized token
// of the hypothesis appears in the normalized premise.
class LexicalJudge final : public EntailmentJudge {
public:
    bool entails(std::string_view premise, std::string_view hypothesis) override;
};

struct NliServiceConfig {
    std::string url;
    int timeout_ms = 30000;
    int max_retries = 3;
    int retry_backoff_ms = 200;
    int max_in_flight = 4;
};

// HTTP entailment client. Protocol: request {"premise","hypothesis"},
// response {"entailed": bool} or {"prob": number} with prob >= 0.5 counting
// as entailed. Responses are cached.
class NliServiceJudge final : public EntailmentJudge {
public:
    explicit NliServiceJudge(NliServiceConfig config);
    ~NliServiceJudge() override;

    bool entails(std::string_view premise, std::string_view hypothesis) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Entailment via a binary-judgment LLM call, cached.
class LlmEntailmentJudge final : public EntailmentJudge {
public:
    explicit LlmEntailmentJudge(LlmClient& llm) : llm_(llm) {}

    bool entails(std::string_view premise, std::string_view hypothesis) override;

private:
    LlmClient& llm_;
    std::mutex mu_;
    std::unordered_map<std::string, bool> cache_;
};

// ---------------------------------------------------------------------------
// Correctness metrics

// Fraction of alias-sets with some alias appearing, normalized, as a
// substring of the normalized answer. short_answers must be non-empty.
double em_recall(std::string_view answer_text, const AliasSets& short_answers);

struct ListQaScores {
    double precision = 0.0;
    double recall = 0.0; // capped: denominator is min(5, |gold|)
    double f1 = 0.0;
};

// predicted must already be normalized and deduplicated.
ListQaScores list_qa_metrics(const std::vector<std::string>& predicted, const AliasSets& gold);

// Normalized, deduplicated entity list from an entity-list answer.
std::vector<std::string> predicted_entities(const Answer& answer);

// Fraction of claims entailed by the answer text. claims must be non-empty.
double claim_recall(std::string_view answer_text, const std::vector<std::string>& claims,
                    EntailmentJudge& judge);

// ---------------------------------------------------------------------------
// Citation quality

// Mean over statements of [cited documents entail the statement]; an uncited
// statement counts 0. Premises concatenate cited texts in citation order.
double citation_recall(const Answer& answer, const DocRefs& docs, EntailmentJudge& judge);

// A citation is irrelevant iff it does not entail its statement alone AND the
// remaining citations still entail it. Precision is relevant/total citations,
// 0 when the answer has no citations.
double citation_precision(const Answer& answer, const DocRefs& docs, EntailmentJudge& judge);

// Harmonic mean; 0 whenever either input is 0.
double citation_f1(double recall, double precision);

// ---------------------------------------------------------------------------
// Reports

enum class DatasetMode { asqa, qampari, eli5, generic };

const char* to_string(DatasetMode mode);
DatasetMode dataset_mode_from_string(std::string_view name);

struct ExampleEval {
    std::string id;
    std::optional<double> em_recall;
    std::optional<double> list_precision;
    std::optional<double> list_recall;
    std::optional<double> list_f1;
    std::optional<double> claim_recall;
    double citation_recall = 0.0;
    double citation_precision = 0.0;
    double citation_f1 = 0.0;
};

struct EvalReport {
    DatasetMode mode = DatasetMode::generic;
    std::vector<ExampleEval> examples;
    // percent-scale aggregates (means x 100)
    std::optional<double> correct; // EM-R / list F1 / claim recall depending on mode
    std::optional<double> list_precision;
    std::optional<double> list_recall;
    double cite_recall = 0.0;
    double cite_precision = 0.0;
    double cite_f1 = 0.0;

    void aggregate(); // recompute the percent-scale means from examples
    std::string table() const; // one-decimal summary row
};

// One JSON line per example plus a final aggregate line.
std::string report_to_jsonl(const EvalReport& report);

} // namespace vergen
