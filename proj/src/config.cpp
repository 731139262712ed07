#include "vergen/config.hpp"

#include "vergen/errors.hpp"

#include <fstream>
#include <sstream>

namespace vergen {

namespace {

std::string trim(const std::string& s) {
    std::size_t begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    std::size_t end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw Error(ErrorKind::Config, "config key " + key + " expects a boolean, got " + value);
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        return std::stoi(value);
    } catch (const std::exception&) {
        throw Error(ErrorKind::Config, "config key " + key + " expects an integer, got " + value);
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        return std::stod(value);
    } catch (const std::exception&) {
        throw Error(ErrorKind::Config, "config key " + key + " expects a number, got " + value);
    }
}

QueryStyle parse_query_style(const std::string& value) {
    if (value == "passage" || value == "missing_passage") return QueryStyle::missing_passage;
    if (value == "question" || value == "missing_question") return QueryStyle::missing_question;
    throw Error(ErrorKind::Config, "query_style must be passage or question, got " + value);
}

void require_file(const std::filesystem::path& path, const char* what) {
    if (path.empty()) {
        throw Error(ErrorKind::Config, std::string(what) + " is not configured");
    }
    if (!std::filesystem::is_regular_file(path)) {
        throw Error(ErrorKind::Config,
                    std::string(what) + " does not exist: " + path.string());
    }
}

} // namespace

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Config, "cannot open config: " + path.string());

    RunConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorKind::Config, "config line " + std::to_string(line_no) +
                                               ": expected key = value");
        }
        config.apply_override(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
    }
    return config;
}

void RunConfig::apply_override(const std::string& key, const std::string& value) {
    if (key == "corpus") corpus = value;
    else if (key == "dataset") dataset = value;
    else if (key == "dataset_mode") dataset_mode = dataset_mode_from_string(value);
    else if (key == "retriever") retriever = value;
    else if (key == "index") index = value;
    else if (key == "bm25_k1") bm25_k1 = parse_double(key, value);
    else if (key == "bm25_b") bm25_b = parse_double(key, value);
    else if (key == "embedding_endpoint") embedding_endpoint = value;
    else if (key == "embedding_auth_token") embedding_auth_token = value;
    else if (key == "k") params.k = parse_int(key, value);
    else if (key == "max_iterations") params.max_iterations = parse_int(key, value);
    else if (key == "candidates_per_query") params.candidates_per_query = parse_int(key, value);
    else if (key == "window_size") params.window_size = parse_int(key, value);
    else if (key == "verification_mode") {
        params.verification_mode = verification_mode_from_string(value);
    } else if (key == "tau") params.tau = parse_int(key, value);
    else if (key == "query_style") params.missing_info_style = parse_query_style(value);
    else if (key == "hyde_first_query") params.hyde_first_query = parse_bool(key, value);
    else if (key == "use_summaries") params.use_summaries = parse_bool(key, value);
    else if (key == "summarize_missing") params.summarize_missing = parse_bool(key, value);
    else if (key == "per_doc_char_budget") params.per_doc_char_budget = parse_int(key, value);
    else if (key == "llm") llm = value;
    else if (key == "mock_script") mock_script = value;
    else if (key == "llm_endpoint") llm_endpoint = value;
    else if (key == "llm_model") llm_model = value;
    else if (key == "llm_api_key_env") llm_api_key_env = value;
    else if (key == "llm_timeout_ms") llm_timeout_ms = parse_int(key, value);
    else if (key == "llm_max_retries") llm_max_retries = parse_int(key, value);
    else if (key == "llm_cache") llm_cache = parse_bool(key, value);
    else if (key == "judge") judge = value;
    else if (key == "nli_endpoint") nli_endpoint = value;
    else if (key == "generation_prompt_file") generation_prompt_file = value;
    else if (key == "generation_demos_file") generation_demos_file = value;
    else if (key == "verification_demo_file") verification_demo_file = value;
    else if (key == "parallelism") parallelism = parse_int(key, value);
    else if (key == "run_dir") run_dir = value;
    else throw Error(ErrorKind::Config, "unknown config key: " + key);
}

void RunConfig::validate(bool for_run) const {
    params.validate();
    if (retriever != "bm25" && retriever != "embedding-service") {
        throw Error(ErrorKind::Config, "retriever must be bm25 or embedding-service");
    }
    if (judge != "lexical" && judge != "nli-service" && judge != "llm") {
        throw Error(ErrorKind::Config, "judge must be lexical, nli-service or llm");
    }
    if (llm != "mock" && llm != "remote") {
        throw Error(ErrorKind::Config, "llm must be mock or remote");
    }
    if (parallelism < 1) throw Error(ErrorKind::Config, "parallelism must be >= 1");
    if (bm25_k1 < 0.0 || bm25_b < 0.0 || bm25_b > 1.0) {
        throw Error(ErrorKind::Config, "bm25 parameters out of range");
    }
    if (!for_run) return;

    require_file(corpus, "corpus");
    require_file(dataset, "dataset");
    if (retriever == "embedding-service" && embedding_endpoint.empty()) {
        throw Error(ErrorKind::Config, "embedding-service retriever needs embedding_endpoint");
    }
    if (llm == "mock") {
        require_file(mock_script, "mock_script");
    } else if (llm_endpoint.empty()) {
        throw Error(ErrorKind::Config, "remote llm needs llm_endpoint");
    }
    require_file(generation_prompt_file, "generation_prompt_file");
    if (!generation_demos_file.empty()) require_file(generation_demos_file, "generation_demos_file");
    if (params.verification_mode == VerificationMode::classification) {
        require_file(verification_demo_file, "verification_demo_file");
    }
    if (run_dir.empty()) throw Error(ErrorKind::Config, "run_dir is not configured");

    // mode-required gold fields are checked against the dataset itself
    const auto records = load_dataset(dataset);
    const bool needs_gold = params.verification_mode == VerificationMode::gold_oracle;
    validate_for_mode(records, dataset_mode, needs_gold);
    if (needs_gold) {
        for (const auto& record : records) {
            if (oracle_gold(record, dataset_mode).empty()) {
                throw Error(ErrorKind::Config,
                            "gold-oracle verification needs gold answers; record " + record.id +
                                " has none");
            }
        }
    }
}

std::string RunConfig::snapshot_text() const {
    std::ostringstream out;
    out.precision(17);
    auto emit = [&](const char* key, const auto& value) { out << key << " = " << value << "\n"; };
    auto emit_path = [&](const char* key, const std::filesystem::path& value) {
        if (!value.empty()) emit(key, value.string());
    };
    auto emit_str = [&](const char* key, const std::string& value) {
        if (!value.empty()) emit(key, value);
    };
    auto emit_bool = [&](const char* key, bool value) { emit(key, value ? "true" : "false"); };

    emit_path("corpus", corpus);
    emit_path("dataset", dataset);
    emit("dataset_mode", to_string(dataset_mode));
    emit("retriever", retriever);
    emit_path("index", index);
    emit("bm25_k1", bm25_k1);
    emit("bm25_b", bm25_b);
    emit_str("embedding_endpoint", embedding_endpoint);
    emit_str("embedding_auth_token", embedding_auth_token);
    emit("k", params.k);
    emit("max_iterations", params.max_iterations);
    emit("candidates_per_query", params.candidates_per_query);
    emit("window_size", params.window_size);
    emit("verification_mode", to_string(params.verification_mode));
    if (params.tau) emit("tau", *params.tau);
    emit("query_style", params.missing_info_style == QueryStyle::missing_question ? "question"
                                                                                  : "passage");
    emit_bool("hyde_first_query", params.hyde_first_query);
    emit_bool("use_summaries", params.use_summaries);
    emit_bool("summarize_missing", params.summarize_missing);
    emit("per_doc_char_budget", params.per_doc_char_budget);
    emit("llm", llm);
    emit_path("mock_script", mock_script);
    emit_str("llm_endpoint", llm_endpoint);
    emit("llm_model", llm_model);
    emit("llm_api_key_env", llm_api_key_env);
    emit("llm_timeout_ms", llm_timeout_ms);
    emit("llm_max_retries", llm_max_retries);
    emit_bool("llm_cache", llm_cache);
    emit("judge", judge);
    emit_str("nli_endpoint", nli_endpoint);
    emit_path("generation_prompt_file", generation_prompt_file);
    emit_path("generation_demos_file", generation_demos_file);
    emit_path("verification_demo_file", verification_demo_file);
    emit("parallelism", parallelism);
    emit_path("run_dir", run_dir);
    return out.str();
}

} // namespace vergen
