#pragma once

#include "vergen/corpus.hpp"
#include "vergen/dataset.hpp"
#include "vergen/generation.hpp"
#include "vergen/llm.hpp"
#include "vergen/retriever.hpp"
#include "vergen/update.hpp"
#include "vergen/verification.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vergen {

struct PipelineParams {
    int k = 5;                     // supporting documents
    int max_iterations = 4;        // T
    int candidates_per_query = 50; // N
    int window_size = 20;          // W
    VerificationMode verification_mode = VerificationMode::classification;
    std::optional<int> tau; // required for score_filter
    QueryStyle missing_info_style = QueryStyle::missing_passage;
    bool hyde_first_query = false;
    bool use_summaries = true;
    bool summarize_missing = true;
    int per_doc_char_budget = 2000;

    void validate() const; // throws Config on out-of-range values
};

struct IterationRecord {
    int iteration = 0;
    std::string query_text;
    QueryStyle query_style = QueryStyle::original_question;
    bool query_fallback = false;
    int candidates_returned = 0;            // entries the retriever produced
    std::vector<std::string> candidate_ids; // after seen-candidate exclusion
    int selection_calls = 0;
    bool selection_degraded = false;
    bool selection_padded = false;
    std::vector<std::string> supporting_ids; // D after this iteration
    bool verification_run = false;
    Verdict verdict = Verdict::No;
    std::optional<int> score;
    bool verdict_parse_failed = false;
};

struct TraceTotals {
    int iterations_run = 0;
    int candidates_returned = 0;
    int llm_calls = 0;
    long prompt_tokens = 0;
    long completion_tokens = 0;
};

struct RetrievalTrace {
    std::string question_id;
    std::string question;
    std::vector<IterationRecord> iterations;
    TraceTotals totals;
    bool verified = false;
    bool failed = false;
    std::string failure;
};

struct PipelineResult {
    DocRefs docs;
    RetrievalTrace trace;
};

// The verify-update loop: start from the question (or a pseudo passage),
// retrieve candidates, fold selection over candidate windows, verify, and
// regenerate the query from missing information until verification passes
// or the iteration budget is spent. The final supporting set is returned
// either way; hard retriever/LLM failures mark the trace failed instead of
// propagating.
PipelineResult run_verified_retrieval(const std::string& question_id,
                                      const std::string& question,
                                      const AliasSets& oracle_gold, const Corpus& corpus,
                                      Retriever& retriever, LlmClient& llm,
                                      const PipelineParams& params,
                                      const std::string& verification_demo,
                                      SummaryCache* summaries);

struct AnswerRecord {
    std::string id;
    std::string question;
    std::string answer_text;
    std::vector<Statement> statements;
    std::vector<Document> docs; // supporting documents in citation-index order
    bool verified = false;
    bool failed = false;
    std::string failure;
};

std::string answer_to_json(const AnswerRecord& record);
AnswerRecord answer_from_json(const std::string& line);

struct BatchOptions {
    PipelineParams params;
    DatasetMode mode = DatasetMode::generic;
    int parallelism = 1;
    GenerationInputs generation;
    std::string verification_demo;
    std::filesystem::path run_dir;
};

struct BatchResult {
    int examples = 0;
    int failures = 0;
    int verified = 0;
    double avg_candidates = 0.0;
    std::vector<int> iteration_counts; // examples reaching iteration i+1
    long llm_calls = 0;
    long prompt_tokens = 0;
    long completion_tokens = 0;
};

// Runs every dataset record through retrieval then generation, persisting
// one trace and one answer record per question plus an aggregate record.
// Per-question failures are recorded, never propagated.
BatchResult run_batch(const std::vector<DatasetRecord>& records, const Corpus& corpus,
                      Retriever& retriever, LlmClient& llm, const BatchOptions& options,
                      SummaryCache* summaries);

// Scores every persisted answer against the gold records; errors when a
// persisted answer has no gold record. Deterministic given the judge.
EvalReport evaluate_run(const std::filesystem::path& run_dir,
                        const std::vector<DatasetRecord>& gold, DatasetMode mode,
                        EntailmentJudge& judge);

// Serialization used by the run directory and the trace subcommand.
std::string trace_to_jsonl(const RetrievalTrace& trace);
RetrievalTrace trace_from_jsonl(const std::string& content);

// Filesystem-safe name for a question id.
std::string sanitize_id(const std::string& id);

} // namespace vergen
