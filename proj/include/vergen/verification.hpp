#pragma once

#include "vergen/corpus.hpp"
#include "vergen/llm.hpp"
#include "vergen/parsers.hpp"

#include <optional>
#include <string>
#include <vector>

namespace vergen {

enum class VerificationMode { classification, score_filter, gold_oracle };

const char* to_string(VerificationMode mode);
VerificationMode verification_mode_from_string(std::string_view name);

struct VerificationResult {
    Verdict verdict = Verdict::No;
    std::optional<int> score; // score_filter only
    VerificationMode mode = VerificationMode::classification;
    std::string raw_response;
    bool parse_failed = false;
};

// One LLM call with the binary-judgment prompt. An unparseable verdict is
// logged and treated as No so the loop keeps updating.
VerificationResult verify_classification(const std::string& question, const DocRefs& docs,
                                         const std::string& demo, LlmClient& llm);

// One LLM scoring call; verdict is Yes iff score >= tau (boundary inclusive).
// An unparseable score counts as 0.
VerificationResult verify_score_filter(const std::string& question, const DocRefs& docs,
                                       LlmClient& llm, int tau);

// Deterministic oracle: Yes iff every gold alias-set has some alias that
// appears, normalized, as a substring of the concatenated document texts.
VerificationResult verify_gold_oracle(const std::string& question, const DocRefs& docs,
                                      const std::vector<std::vector<std::string>>& gold_alias_sets);

} // namespace vergen
