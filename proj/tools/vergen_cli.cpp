#include "vergen/bm25.hpp"
#include "vergen/config.hpp"
#include "vergen/errors.hpp"
#include "vergen/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace {

using namespace vergen;

// 0 success, 1 config error, 2 partial failures, 3 hard failure
int exit_code_for(const Error& error) {
    switch (error.kind()) {
        case ErrorKind::Config:
        case ErrorKind::Validation:
        case ErrorKind::Dataset:
        case ErrorKind::Corpus:
        case ErrorKind::NotFound:
            return 1;
        default:
            return 3;
    }
}

std::string read_text_file(const std::filesystem::path& path) {
    if (path.empty()) return {};
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunConfig load_config(const std::string& config_path,
                      const std::vector<std::string>& overrides) {
    RunConfig config =
        config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    for (const auto& assignment : overrides) {
        auto eq = assignment.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::Config, "--set expects key=value, got " + assignment);
        }
        config.apply_override(assignment.substr(0, eq), assignment.substr(eq + 1));
    }
    return config;
}

std::unique_ptr<Retriever> make_retriever(const RunConfig& config, const Corpus& corpus) {
    if (config.retriever == "embedding-service") {
        EmbeddingServiceConfig service;
        service.url = config.embedding_endpoint;
        service.auth_token = config.embedding_auth_token;
        return std::make_unique<EmbeddingServiceRetriever>(service, corpus);
    }
    Bm25Params params{config.bm25_k1, config.bm25_b};
    if (!config.index.empty() && std::filesystem::is_regular_file(config.index)) {
        return std::make_unique<Bm25Retriever>(Bm25Index::load(config.index, corpus));
    }
    return std::make_unique<Bm25Retriever>(Bm25Index::build(corpus, params));
}

struct LlmStack {
    std::unique_ptr<LlmClient> base;
    std::unique_ptr<CachingLlmClient> cache;
    LlmClient* client = nullptr;
};

LlmStack make_llm(const RunConfig& config) {
    LlmStack stack;
    if (config.llm == "mock") {
        stack.base = std::make_unique<ScriptedMockLlm>(
            ScriptedMockLlm::from_script_file(config.mock_script));
    } else {
        RemoteLlmConfig remote;
        remote.url = config.llm_endpoint;
        remote.model = config.llm_model;
        remote.api_key_env = config.llm_api_key_env;
        remote.timeout_ms = config.llm_timeout_ms;
        remote.max_retries = config.llm_max_retries;
        stack.base = std::make_unique<RemoteLlmClient>(remote);
    }
    if (config.llm_cache && !config.run_dir.empty()) {
        stack.cache = std::make_unique<CachingLlmClient>(*stack.base, config.llm_model,
                                                         config.run_dir / "llm_cache");
        stack.client = stack.cache.get();
    } else {
        stack.client = stack.base.get();
    }
    return stack;
}

int cmd_index(const RunConfig& config) {
    config.validate(false);
    if (config.corpus.empty() || config.index.empty()) {
        throw Error(ErrorKind::Config, "index subcommand needs corpus and index paths");
    }
    Corpus corpus = Corpus::load_jsonl(config.corpus);
    Bm25Index index = Bm25Index::build(corpus, Bm25Params{config.bm25_k1, config.bm25_b});
    index.save(config.index);
    std::printf("indexed %zu documents (%zu tokens, avg length %.1f) -> %s\n", corpus.size(),
                corpus.stats().total_tokens, index.avg_doc_length(),
                config.index.string().c_str());
    return 0;
}

int cmd_run(const RunConfig& config) {
    config.validate(true);
    Corpus corpus = Corpus::load_jsonl(config.corpus);
    auto records = load_dataset(config.dataset);
    auto retriever = make_retriever(config, corpus);
    LlmStack llm = make_llm(config);
    SummaryCache summaries(config.run_dir / "summaries");

    BatchOptions options;
    options.params = config.params;
    options.mode = config.dataset_mode;
    options.parallelism = config.parallelism;
    options.generation.instruction = read_text_file(config.generation_prompt_file);
    options.generation.demos = read_text_file(config.generation_demos_file);
    options.verification_demo = read_text_file(config.verification_demo_file);
    options.run_dir = config.run_dir;

    std::filesystem::create_directories(config.run_dir);
    {
        std::ofstream out(config.run_dir / "config.snapshot", std::ios::trunc);
        out << config.snapshot_text();
    }

    BatchResult result =
        run_batch(records, corpus, *retriever, *llm.client, options, &summaries);

    std::printf("run directory: %s\n", config.run_dir.string().c_str());
    std::printf("examples: %d  verified: %d  failures: %d\n", result.examples, result.verified,
                result.failures);
    std::printf("avg document candidates: %.1f\n", result.avg_candidates);
    for (std::size_t i = 0; i < result.iteration_counts.size(); ++i) {
        std::printf("iteration %zu: %d\n", i + 1, result.iteration_counts[i]);
    }
    std::printf("llm calls: %ld\n", result.llm_calls);
    return result.failures > 0 ? 2 : 0;
}

int cmd_eval(const RunConfig& config, const std::string& run_dir_flag) {
    config.validate(false);
    const std::filesystem::path run_dir =
        run_dir_flag.empty() ? config.run_dir : std::filesystem::path(run_dir_flag);
    if (run_dir.empty()) throw Error(ErrorKind::Config, "eval needs --run-dir");
    if (config.dataset.empty()) throw Error(ErrorKind::Config, "eval needs the dataset (gold)");
    auto records = load_dataset(config.dataset);
    validate_for_mode(records, config.dataset_mode, true);

    std::unique_ptr<EntailmentJudge> judge;
    LlmStack llm;
    if (config.judge == "lexical") {
        judge = std::make_unique<LexicalJudge>();
    } else if (config.judge == "nli-service") {
        NliServiceConfig nli;
        nli.url = config.nli_endpoint;
        if (nli.url.empty()) {
            if (const char* env = std::getenv("VERGEN_NLI_ENDPOINT")) nli.url = env;
        }
        if (nli.url.empty()) {
            throw Error(ErrorKind::Config,
                        "nli-service judge needs nli_endpoint or VERGEN_NLI_ENDPOINT");
        }
        judge = std::make_unique<NliServiceJudge>(nli);
    } else {
        llm = make_llm(config);
        judge = std::make_unique<LlmEntailmentJudge>(*llm.client);
    }

    EvalReport report = evaluate_run(run_dir, records, config.dataset_mode, *judge);

    std::filesystem::create_directories(run_dir / "eval");
    {
        std::ofstream out(run_dir / "eval" / "report.jsonl", std::ios::trunc);
        out << report_to_jsonl(report);
    }
    std::printf("%s", report.table().c_str());
    return 0;
}

int cmd_trace(const std::string& run_dir_flag, const std::string& question_id) {
    const std::filesystem::path path = std::filesystem::path(run_dir_flag) / "traces" /
                                       (sanitize_id(question_id) + ".jsonl");
    if (!std::filesystem::is_regular_file(path)) {
        throw Error(ErrorKind::NotFound, "no trace for question id " + question_id);
    }
    std::ifstream in(path);
    std::ostringstream buf;
    buf << in.rdbuf();
    RetrievalTrace trace = trace_from_jsonl(buf.str());

    std::printf("question %s: %s\n", trace.question_id.c_str(), trace.question.c_str());
    for (const auto& it : trace.iterations) {
        std::printf("-- iteration %d\n", it.iteration);
        std::string query = it.query_text;
        if (query.size() > 120) query = query.substr(0, 117) + "...";
        std::printf("   query (%s%s): %s\n", to_string(it.query_style),
                    it.query_fallback ? ", fallback" : "", query.c_str());
        std::printf("   candidates: %d returned, %zu new\n", it.candidates_returned,
                    it.candidate_ids.size());
        std::printf("   selection: %d call(s)%s%s\n", it.selection_calls,
                    it.selection_degraded ? ", degraded" : "",
                    it.selection_padded ? ", padded" : "");
        std::string supporting;
        for (const auto& id : it.supporting_ids) {
            if (!supporting.empty()) supporting += ", ";
            supporting += id;
        }
        std::printf("   supporting: [%s]\n", supporting.c_str());
        if (it.verification_run) {
            std::printf("   verdict: %s%s", it.verdict == Verdict::Yes ? "YES" : "NO",
                        it.verdict_parse_failed ? " (unparseable output)" : "");
            if (it.score) std::printf(" score=%d", *it.score);
            std::printf("\n");
        } else {
            std::printf("   verdict: skipped (no documents)\n");
        }
    }
    std::printf("totals: %d iteration(s), %d candidates, %d llm calls, %ld+%ld tokens\n",
                trace.totals.iterations_run, trace.totals.candidates_returned,
                trace.totals.llm_calls, trace.totals.prompt_tokens,
                trace.totals.completion_tokens);
    if (trace.failed) std::printf("status: FAILED (%s)\n", trace.failure.c_str());
    else if (!trace.verified) std::printf("status: UNVERIFIED after %d iterations\n",
                                          trace.totals.iterations_run);
    else std::printf("status: verified\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"LLM-verified retrieval pipeline for cited question answering"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string run_dir_flag;
    std::string question_id;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("-c,--config", config_path, "configuration file (key = value lines)");
        cmd->add_option("--set", overrides, "override a config key, e.g. --set k=5")
            ->take_all();
    };

    CLI::App* index = app.add_subcommand("index", "build and persist the BM25 index");
    add_common(index);
    CLI::App* run = app.add_subcommand("run", "run the retrieval+generation batch");
    add_common(run);
    CLI::App* eval = app.add_subcommand("eval", "score a finished run against gold records");
    add_common(eval);
    eval->add_option("--run-dir", run_dir_flag, "run directory to score");
    CLI::App* trace = app.add_subcommand("trace", "print one question's iteration log");
    trace->add_option("--run-dir", run_dir_flag, "run directory")->required();
    trace->add_option("--id", question_id, "question id")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (index->parsed()) return cmd_index(load_config(config_path, overrides));
        if (run->parsed()) return cmd_run(load_config(config_path, overrides));
        if (eval->parsed()) return cmd_eval(load_config(config_path, overrides), run_dir_flag);
        if (trace->parsed()) return cmd_trace(run_dir_flag, question_id);
    } catch (const Error& error) {
        std::fprintf(stderr, "error (%s): %s\n", to_string(error.kind()), error.what());
        return exit_code_for(error);
    } catch (const std::exception& error) {
        std::fprintf(stderr, "error: %s\n", error.what());
        return 3;
    }
    return 0;
}
