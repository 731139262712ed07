#include "vergen/verification.hpp"

#include "vergen/errors.hpp"
#include "vergen/log.hpp"
#include "vergen/prompts.hpp"
#include "vergen/text.hpp"

namespace vergen {

const char* to_string(VerificationMode mode) {
    switch (mode) {
        case VerificationMode::classification: return "classification";
        case VerificationMode::score_filter: return "score-filter";
        case VerificationMode::gold_oracle: return "gold-oracle";
    }
    return "unknown";
}

VerificationMode verification_mode_from_string(std::string_view name) {
    if (name == "classification") return VerificationMode::classification;
    if (name == "score-filter" || name == "score_filter") return VerificationMode::score_filter;
    if (name == "gold-oracle" || name == "gold_oracle") return VerificationMode::gold_oracle;
    throw Error(ErrorKind::Config, "unknown verification mode: " + std::string(name));
}

namespace {

std::vector<DocForPrompt> docs_for_prompt(const DocRefs& docs) {
    std::vector<DocForPrompt> out;
    out.reserve(docs.size());
    for (const Document* doc : docs) out.push_back({doc->title, doc->text});
    return out;
}

LlmResponse run_prompt(LlmTag tag, const std::string& question, const DocRefs& docs,
                       const std::string& demo, LlmClient& llm) {
    PromptSlots slots;
    slots.question = question;
    slots.documents = docs_for_prompt(docs);
    slots.demo = demo;
    RenderedPrompt prompt = render_prompt(tag, slots);

    LlmRequest request;
    request.tag = tag;
    request.system_instruction = std::move(prompt.system_instruction);
    request.user_content = std::move(prompt.user_content);
    request.max_tokens = 64;
    return llm.complete(request);
}

} // namespace

VerificationResult verify_classification(const std::string& question, const DocRefs& docs,
                                         const std::string& demo, LlmClient& llm) {
    if (docs.empty()) {
        throw Error(ErrorKind::Validation, "verify_classification: empty document set");
    }
    LlmResponse response = run_prompt(LlmTag::verify_classify, question, docs, demo, llm);

    VerificationResult result;
    result.mode = VerificationMode::classification;
    result.raw_response = response.text;
    try {
        result.verdict = parse_binary_verdict(response.text);
    } catch (const Error&) {
        log_warn("unparseable verification verdict, treating as No");
        result.verdict = Verdict::No;
        result.parse_failed = true;
    }
    return result;
}

VerificationResult verify_score_filter(const std::string& question, const DocRefs& docs,
                                       LlmClient& llm, int tau) {
    if (docs.empty()) {
        throw Error(ErrorKind::Validation, "verify_score_filter: empty document set");
    }
    if (tau < 0 || tau > 10) {
        throw Error(ErrorKind::Validation, "verify_score_filter: tau outside [0, 10]");
    }
    LlmResponse response = run_prompt(LlmTag::verify_score, question, docs, {}, llm);

    VerificationResult result;
    result.mode = VerificationMode::score_filter;
    result.raw_response = response.text;
    int score = 0;
    try {
        score = parse_score(response.text);
    } catch (const Error&) {
        log_warn("unparseable verification score, treating as 0");
        result.parse_failed = true;
    }
    result.score = score;
    result.verdict = score >= tau ? Verdict::Yes : Verdict::No;
    return result;
}

VerificationResult verify_gold_oracle(const std::string& question, const DocRefs& docs,
                                      const std::vector<std::vector<std::string>>& gold_alias_sets) {
    (void)question;
    if (gold_alias_sets.empty()) {
        throw Error(ErrorKind::Validation, "verify_gold_oracle: empty gold set");
    }

    std::string joined;
    for (const Document* doc : docs) {
        joined += doc->text;
        joined.push_back(' ');
    }
    const std::string premise = text::normalize(joined);

    bool all_present = true;
    for (const auto& aliases : gold_alias_sets) {
        bool found = false;
        for (const auto& alias : aliases) {
            if (premise.find(text::normalize(alias)) != std::string::npos) {
                found = true;
                break;
            }
        }
        if (!found) {
            all_present = false;
            break;
        }
    }

    VerificationResult result;
    result.mode = VerificationMode::gold_oracle;
    result.verdict = all_present ? Verdict::Yes : Verdict::No;
    return result;
}

} // namespace vergen
