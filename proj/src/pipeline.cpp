#include "vergen/pipeline.hpp"

#include "vergen/errors.hpp"
#include "vergen/log.hpp"
#include "vergen/text.hpp"
#include "fs_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <exception>
#include <fstream>
#include <sstream>
#include <unordered_set>


namespace vergen {

using nlohmann::json;

void PipelineParams::validate() const {
    if (k < 1) throw Error(ErrorKind::Config, "k must be >= 1");
    if (max_iterations < 1) throw Error(ErrorKind::Config, "max_iterations must be >= 1");
    if (candidates_per_query < 1) {
        throw Error(ErrorKind::Config, "candidates_per_query must be >= 1");
    }
    if (window_size < 1) throw Error(ErrorKind::Config, "window_size must be >= 1");
    if (per_doc_char_budget < 0) {
        throw Error(ErrorKind::Config, "per_doc_char_budget must be >= 0");
    }
    if (verification_mode == VerificationMode::score_filter) {
        if (!tau) throw Error(ErrorKind::Config, "score-filter verification requires tau");
        if (*tau < 0 || *tau > 10) throw Error(ErrorKind::Config, "tau must lie in [0, 10]");
    }
    if (missing_info_style != QueryStyle::missing_passage &&
        missing_info_style != QueryStyle::missing_question) {
        throw Error(ErrorKind::Config, "missing_info_style must be passage or question");
    }
}

// ---------------------------------------------------------------------------
// The verify-update loop (one question)

PipelineResult run_verified_retrieval(const std::string& question_id,
                                      const std::string& question,
                                      const AliasSets& oracle_gold, const Corpus& corpus,
                                      Retriever& retriever, LlmClient& llm,
                                      const PipelineParams& params,
                                      const std::string& verification_demo,
                                      SummaryCache* summaries) {
    params.validate();

    PipelineResult result;
    result.trace.question_id = question_id;
    result.trace.question = question;

    CountingLlmClient counted(llm);

    SelectionOptions selection;
    selection.k = params.k;
    selection.use_summaries = params.use_summaries;
    selection.summarize_missing = params.summarize_missing;
    selection.per_doc_char_budget = params.per_doc_char_budget;

    Query query{question, QueryStyle::original_question, 1};
    DocRefs docs;
    std::unordered_set<std::string> seen_candidates;

    try {
        if (params.hyde_first_query) {
            QueryGen hyde = hyde_first_query(question, counted);
            query = hyde.query;
            query.iteration = 1;
            if (hyde.fell_back) {
                log_warn("hyde first query fell back to the question for " + question_id);
            }
        }

        for (int iteration = 1; iteration <= params.max_iterations; ++iteration) {
            IterationRecord record;
            record.iteration = iteration;

            if (!docs.empty()) {
                QueryGen regen = generate_missing_info_query(question, docs,
                                                             params.missing_info_style,
                                                             counted, iteration);
                query = regen.query;
                record.query_fallback = regen.fell_back;
            }
            query.iteration = iteration;
            record.query_text = query.text;
            record.query_style = query.style;

            RankedList ranked = retriever.retrieve(query, params.candidates_per_query);
            ranked.validate();
            record.candidates_returned = static_cast<int>(ranked.entries.size());

            DocRefs fresh;
            for (const auto& entry : ranked.entries) {
                if (!seen_candidates.insert(entry.doc_id).second) continue;
                fresh.push_back(&corpus.at(entry.doc_id));
                record.candidate_ids.push_back(entry.doc_id);
            }

            if (!fresh.empty()) {
                SelectFold fold = select_over_candidates(question, docs, fresh, selection,
                                                         params.window_size, counted, summaries);
                docs = std::move(fold.docs);
                record.selection_calls = fold.selection_calls;
                record.selection_degraded = fold.any_degraded;
                record.selection_padded = fold.any_padded;
            }
            for (const Document* doc : docs) record.supporting_ids.push_back(doc->id);

            bool stop = false;
            if (!docs.empty()) {
                VerificationResult verification;
                switch (params.verification_mode) {
                    case VerificationMode::classification:
                        verification =
                            verify_classification(question, docs, verification_demo, counted);
                        break;
                    case VerificationMode::score_filter:
                        verification = verify_score_filter(question, docs, counted, *params.tau);
                        break;
                    case VerificationMode::gold_oracle:
                        verification = verify_gold_oracle(question, docs, oracle_gold);
                        break;
                }
                record.verification_run = true;
                record.verdict = verification.verdict;
                record.score = verification.score;
                record.verdict_parse_failed = verification.parse_failed;
                stop = verification.verdict == Verdict::Yes;
            }

            result.trace.totals.candidates_returned += record.candidates_returned;
            result.trace.totals.iterations_run = iteration;
            result.trace.iterations.push_back(std::move(record));
            if (stop) {
                result.trace.verified = true;
                break;
            }
        }
    } catch (const std::exception& e) {
        result.trace.failed = true;
        result.trace.failure = e.what();
        log_warn("question " + question_id + " failed: " + result.trace.failure);
    }

    if (docs.empty() && !result.trace.failed) {
        result.trace.failed = true;
        result.trace.failure = "no documents retrieved";
    }

    result.trace.totals.llm_calls = counted.calls();
    result.trace.totals.prompt_tokens = counted.prompt_tokens();
    result.trace.totals.completion_tokens = counted.completion_tokens();
    result.docs = std::move(docs);
    return result;
}

// ---------------------------------------------------------------------------
// Serialization

namespace {

json iteration_to_json(const IterationRecord& record) {
    json doc{
        {"type", "iteration"},
        {"iteration", record.iteration},
        {"query", record.query_text},
        {"query_style", to_string(record.query_style)},
        {"query_fallback", record.query_fallback},
        {"candidates_returned", record.candidates_returned},
        {"candidate_ids", record.candidate_ids},
        {"selection_calls", record.selection_calls},
        {"selection_degraded", record.selection_degraded},
        {"selection_padded", record.selection_padded},
        {"supporting_ids", record.supporting_ids},
        {"verification_run", record.verification_run},
    };
    if (record.verification_run) {
        doc["verdict"] = record.verdict == Verdict::Yes ? "yes" : "no";
        doc["verdict_parse_failed"] = record.verdict_parse_failed;
        if (record.score) doc["score"] = *record.score;
    }
    return doc;
}

QueryStyle query_style_from_string(const std::string& name) {
    for (QueryStyle style : {QueryStyle::original_question, QueryStyle::missing_question,
                             QueryStyle::missing_passage, QueryStyle::hyde_passage}) {
        if (name == to_string(style)) return style;
    }
    throw Error(ErrorKind::Parse, "unknown query style: " + name);
}

} // namespace

std::string trace_to_jsonl(const RetrievalTrace& trace) {
    std::string out;
    for (const auto& record : trace.iterations) {
        out += iteration_to_json(record).dump();
        out.push_back('\n');
    }
    json summary{
        {"type", "summary"},
        {"question_id", trace.question_id},
        {"question", trace.question},
        {"verified", trace.verified},
        {"failed", trace.failed},
        {"failure", trace.failure},
        {"iterations_run", trace.totals.iterations_run},
        {"candidates_returned", trace.totals.candidates_returned},
        {"llm_calls", trace.totals.llm_calls},
        {"prompt_tokens", trace.totals.prompt_tokens},
        {"completion_tokens", trace.totals.completion_tokens},
    };
    out += summary.dump();
    out.push_back('\n');
    return out;
}

RetrievalTrace trace_from_jsonl(const std::string& content) {
    RetrievalTrace trace;
    std::istringstream in(content);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json doc = json::parse(line);
        const std::string type = doc.value("type", "");
        if (type == "iteration") {
            IterationRecord record;
            record.iteration = doc.at("iteration").get<int>();
            record.query_text = doc.value("query", "");
            record.query_style = query_style_from_string(doc.value("query_style", "original_question"));
            record.query_fallback = doc.value("query_fallback", false);
            record.candidates_returned = doc.value("candidates_returned", 0);
            record.candidate_ids = doc.value("candidate_ids", std::vector<std::string>{});
            record.selection_calls = doc.value("selection_calls", 0);
            record.selection_degraded = doc.value("selection_degraded", false);
            record.selection_padded = doc.value("selection_padded", false);
            record.supporting_ids = doc.value("supporting_ids", std::vector<std::string>{});
            record.verification_run = doc.value("verification_run", false);
            if (record.verification_run) {
                record.verdict = doc.value("verdict", "no") == "yes" ? Verdict::Yes : Verdict::No;
                record.verdict_parse_failed = doc.value("verdict_parse_failed", false);
                if (doc.contains("score")) record.score = doc["score"].get<int>();
            }
            trace.iterations.push_back(std::move(record));
        } else if (type == "summary") {
            trace.question_id = doc.value("question_id", "");
            trace.question = doc.value("question", "");
            trace.verified = doc.value("verified", false);
            trace.failed = doc.value("failed", false);
            trace.failure = doc.value("failure", "");
            trace.totals.iterations_run = doc.value("iterations_run", 0);
            trace.totals.candidates_returned = doc.value("candidates_returned", 0);
            trace.totals.llm_calls = doc.value("llm_calls", 0);
            trace.totals.prompt_tokens = doc.value("prompt_tokens", 0L);
            trace.totals.completion_tokens = doc.value("completion_tokens", 0L);
        }
    }
    return trace;
}

std::string answer_to_json(const AnswerRecord& record) {
    json statements = json::array();
    for (const auto& statement : record.statements) {
        statements.push_back({{"text", statement.text}, {"citations", statement.citations}});
    }
    json docs = json::array();
    for (const auto& doc : record.docs) {
        docs.push_back({{"id", doc.id}, {"title", doc.title}, {"text", doc.text}});
    }
    json out{
        {"id", record.id},
        {"question", record.question},
        {"answer", record.answer_text},
        {"statements", std::move(statements)},
        {"docs", std::move(docs)},
        {"verified", record.verified},
        {"failed", record.failed},
        {"failure", record.failure},
    };
    return out.dump();
}

AnswerRecord answer_from_json(const std::string& line) {
    json doc = json::parse(line);
    AnswerRecord record;
    record.id = doc.at("id").get<std::string>();
    record.question = doc.value("question", "");
    record.answer_text = doc.value("answer", "");
    for (const auto& statement : doc.value("statements", json::array())) {
        Statement s;
        s.text = statement.at("text").get<std::string>();
        s.citations = statement.value("citations", std::vector<int>{});
        record.statements.push_back(std::move(s));
    }
    for (const auto& d : doc.value("docs", json::array())) {
        Document document;
        document.id = d.at("id").get<std::string>();
        document.title = d.value("title", "");
        document.text = d.at("text").get<std::string>();
        record.docs.push_back(std::move(document));
    }
    record.verified = doc.value("verified", false);
    record.failed = doc.value("failed", false);
    record.failure = doc.value("failure", "");
    return record;
}

std::string sanitize_id(const std::string& id) {
    std::string safe;
    bool changed = false;
    for (char c : id) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' ||
                        c == '-';
        safe.push_back(ok ? c : '_');
        changed = changed || !ok;
    }
    if (safe.empty() || changed) {
        safe += "-" + text::fnv1a64_hex(id).substr(0, 8);
    }
    return safe;
}

// ---------------------------------------------------------------------------
// Batch runner

namespace {

struct QuestionOutcome {
    RetrievalTrace trace;
    bool generation_failed = false;
    int generation_calls = 0;
    long generation_prompt_tokens = 0;
    long generation_completion_tokens = 0;
};

void write_file(const std::filesystem::path& path, const std::string& content) {
    detail::write_file_atomic(path, content);
}

} // namespace

BatchResult run_batch(const std::vector<DatasetRecord>& records, const Corpus& corpus,
                      Retriever& retriever, LlmClient& llm, const BatchOptions& options,
                      SummaryCache* summaries) {
    options.params.validate();
    const auto& run_dir = options.run_dir;
    std::filesystem::create_directories(run_dir / "traces");
    std::filesystem::create_directories(run_dir / "answers");

    const AnswerSyntax syntax = options.mode == DatasetMode::qampari
                                    ? AnswerSyntax::entity_list
                                    : AnswerSyntax::prose;

    std::vector<QuestionOutcome> outcomes(records.size());
    const auto n = static_cast<std::int64_t>(records.size());
    const int threads = std::max(1, options.parallelism);

#pragma omp parallel for num_threads(threads) schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const DatasetRecord& record = records[idx];
        QuestionOutcome& outcome = outcomes[idx];

        const std::string question = effective_question(record, options.mode);
        PipelineResult pipeline = run_verified_retrieval(
            record.id, question, oracle_gold(record, options.mode), corpus, retriever, llm,
            options.params, options.verification_demo, summaries);
        outcome.trace = pipeline.trace;

        AnswerRecord answer;
        answer.id = record.id;
        answer.question = question;
        answer.verified = pipeline.trace.verified;
        answer.failed = pipeline.trace.failed;
        answer.failure = pipeline.trace.failure;
        if (!pipeline.docs.empty()) {
            CountingLlmClient counted(llm);
            try {
                Answer generated = generate_answer(question, pipeline.docs, options.generation,
                                                   counted, syntax);
                answer.answer_text = generated.text;
                answer.statements = generated.statements;
                for (const Document* doc : pipeline.docs) answer.docs.push_back(*doc);
            } catch (const std::exception& e) {
                answer.failed = true;
                answer.failure = e.what();
                outcome.generation_failed = true;
                log_warn("generation failed for " + record.id + ": " + e.what());
            }
            outcome.generation_calls = counted.calls();
            outcome.generation_prompt_tokens = counted.prompt_tokens();
            outcome.generation_completion_tokens = counted.completion_tokens();
        }

        try {
            const std::string name = sanitize_id(record.id) + ".jsonl";
            write_file(run_dir / "traces" / name, trace_to_jsonl(outcome.trace));
            write_file(run_dir / "answers" / name, answer_to_json(answer) + "\n");
        } catch (const std::exception& e) {
            outcome.trace.failed = true;
            outcome.trace.failure = e.what();
            log_warn("persisting " + record.id + " failed: " + e.what());
        }
    }

    BatchResult result;
    result.examples = static_cast<int>(records.size());
    result.iteration_counts.assign(static_cast<std::size_t>(options.params.max_iterations), 0);
    long total_candidates = 0;
    for (const auto& outcome : outcomes) {
        if (outcome.trace.failed || outcome.generation_failed) ++result.failures;
        if (outcome.trace.verified) ++result.verified;
        total_candidates += outcome.trace.totals.candidates_returned;
        result.llm_calls += outcome.trace.totals.llm_calls + outcome.generation_calls;
        result.prompt_tokens +=
            outcome.trace.totals.prompt_tokens + outcome.generation_prompt_tokens;
        result.completion_tokens +=
            outcome.trace.totals.completion_tokens + outcome.generation_completion_tokens;
        for (int it = 0; it < outcome.trace.totals.iterations_run &&
                         it < options.params.max_iterations;
             ++it) {
            ++result.iteration_counts[static_cast<std::size_t>(it)];
        }
    }
    result.avg_candidates =
        records.empty() ? 0.0
                        : static_cast<double>(total_candidates) /
                              static_cast<double>(records.size());

    json aggregate{
        {"examples", result.examples},
        {"failures", result.failures},
        {"verified", result.verified},
        {"avg_document_candidates", result.avg_candidates},
        {"iteration_counts", result.iteration_counts},
        {"llm_calls", result.llm_calls},
        {"prompt_tokens", result.prompt_tokens},
        {"completion_tokens", result.completion_tokens},
    };
    write_file(run_dir / "aggregate.jsonl", aggregate.dump() + "\n");
    return result;
}

// ---------------------------------------------------------------------------
// Run evaluation

EvalReport evaluate_run(const std::filesystem::path& run_dir,
                        const std::vector<DatasetRecord>& gold, DatasetMode mode,
                        EntailmentJudge& judge) {
    const auto answers_dir = run_dir / "answers";
    if (!std::filesystem::is_directory(answers_dir)) {
        throw Error(ErrorKind::NotFound, "run directory has no answers/: " + run_dir.string());
    }

    std::unordered_map<std::string, const DatasetRecord*> gold_by_id;
    for (const auto& record : gold) gold_by_id[record.id] = &record;

    std::vector<AnswerRecord> answers;
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(answers_dir)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
        std::ifstream in(file);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty()) answers.push_back(answer_from_json(line));
        }
    }

    for (const auto& answer : answers) {
        if (gold_by_id.find(answer.id) == gold_by_id.end()) {
            throw Error(ErrorKind::NotFound,
                        "no gold record for answered question " + answer.id);
        }
    }

    EvalReport report;
    report.mode = mode;
    report.examples.resize(answers.size());
    std::vector<std::exception_ptr> errors(answers.size());

    const auto n = static_cast<std::int64_t>(answers.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            const AnswerRecord& answer = answers[idx];
            const DatasetRecord& record = *gold_by_id.at(answer.id);

            ExampleEval eval;
            eval.id = answer.id;

            Answer parsed;
            parsed.text = answer.answer_text;
            parsed.statements = answer.statements;
            DocRefs docs;
            docs.reserve(answer.docs.size());
            for (const auto& doc : answer.docs) docs.push_back(&doc);

            switch (mode) {
                case DatasetMode::asqa:
                    if (!record.answers.empty()) {
                        eval.em_recall = em_recall(answer.answer_text, record.answers);
                    }
                    break;
                case DatasetMode::qampari:
                    if (!record.gold_entities.empty()) {
                        ListQaScores scores =
                            list_qa_metrics(predicted_entities(parsed), record.gold_entities);
                        eval.list_precision = scores.precision;
                        eval.list_recall = scores.recall;
                        eval.list_f1 = scores.f1;
                    }
                    break;
                case DatasetMode::eli5:
                    if (!record.claims.empty()) {
                        eval.claim_recall =
                            claim_recall(answer.answer_text, record.claims, judge);
                    }
                    break;
                case DatasetMode::generic:
                    break;
            }

            eval.citation_recall = citation_recall(parsed, docs, judge);
            eval.citation_precision = citation_precision(parsed, docs, judge);
            eval.citation_f1 = citation_f1(eval.citation_recall, eval.citation_precision);
            report.examples[idx] = std::move(eval);
        } catch (...) {
            errors[idx] = std::current_exception();
        }
    }

    for (auto& error : errors) {
        if (error) std::rethrow_exception(error);
    }

    report.aggregate();
    return report;
}

} // namespace vergen
