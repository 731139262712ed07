#pragma once

#include "vergen/llm.hpp"

#include <string>
#include <vector>

namespace vergen {

struct DocForPrompt {
    std::string title;
    std::string body; // full text or summary, caller's choice
};

struct PromptSlots {
    std::string question;
    std::vector<DocForPrompt> documents;
    std::string demo;        // verify_classify demonstration block
    int k = 0;               // select
    std::string instruction; // generate: instruction text supplied via config
    std::string demos;       // generate: demonstrations blob
};

struct RenderedPrompt {
    std::string system_instruction;
    std::string user_content;
};

// Builds the (system, user) pair for a tag. Documents are rendered as
// "Document [i]: <title>: <body>" with 1-based identifiers in given order.
// Throws Validation when a slot the tag requires is missing.
RenderedPrompt render_prompt(LlmTag tag, const PromptSlots& slots);

std::string render_document_block(const std::vector<DocForPrompt>& documents);

// Version key of the summarization template, used by the summary cache.
std::string summarize_prompt_hash();

} // namespace vergen
