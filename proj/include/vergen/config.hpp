#pragma once

#include "vergen/evaluation.hpp"
#include "vergen/pipeline.hpp"

#include <filesystem>
#include <string>

namespace vergen {

// Flat key = value configuration with CLI overrides applied on top.
struct RunConfig {
    std::filesystem::path corpus;
    std::filesystem::path dataset;
    DatasetMode dataset_mode = DatasetMode::generic;

    std::string retriever = "bm25"; // bm25 | embedding-service
    std::filesystem::path index;    // optional persisted index
    double bm25_k1 = 0.9;
    double bm25_b = 0.4;
    std::string embedding_endpoint;
    std::string embedding_auth_token;

    PipelineParams params;

    std::string llm = "mock"; // mock | remote
    std::filesystem::path mock_script;
    std::string llm_endpoint;
    std::string llm_model = "gpt-3.5-turbo";
    std::string llm_api_key_env = "VERGEN_LLM_API_KEY";
    int llm_timeout_ms = 60000;
    int llm_max_retries = 3;
    bool llm_cache = true;

    std::string judge = "lexical"; // lexical | nli-service | llm
    std::string nli_endpoint;

    std::filesystem::path generation_prompt_file;
    std::filesystem::path generation_demos_file;
    std::filesystem::path verification_demo_file;

    int parallelism = 1;
    std::filesystem::path run_dir;

    static RunConfig load(const std::filesystem::path& path);
    void apply_override(const std::string& key, const std::string& value);

    // Checks value ranges, referenced files and mode-required gold fields.
    // `for_run` additionally requires everything a batch run needs.
    void validate(bool for_run) const;

    // The effective configuration as key = value lines, loadable with -c:
    // replaying a run directory's snapshot reproduces the run.
    std::string snapshot_text() const;
};

} // namespace vergen
