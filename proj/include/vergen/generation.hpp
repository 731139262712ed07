#pragma once

#include "vergen/corpus.hpp"
#include "vergen/llm.hpp"

#include <string>
#include <vector>

namespace vergen {

struct Statement {
    std::string text;           // citation markers stripped
    std::vector<int> citations; // 1-based indices into the supporting set
};

struct Answer {
    std::string text; // raw generated text
    std::vector<Statement> statements;
};

enum class AnswerSyntax {
    prose,       // sentence-segmented statements
    entity_list, // comma-separated entities, one statement each
};

// Splits generated text into statements and binds "[i]" citation markers to
// their containing statement. Out-of-range markers are dropped; duplicates
// within a statement are dropped. Empty text yields no statements.
std::vector<Statement> parse_cited_text(std::string_view text, int doc_count,
                                        AnswerSyntax syntax = AnswerSyntax::prose);

// Renders statements back to text with the citation markers placed before
// the terminal punctuation; reparsing yields the identical structure.
std::string render_cited_text(const std::vector<Statement>& statements,
                              AnswerSyntax syntax = AnswerSyntax::prose);

struct GenerationInputs {
    std::string instruction; // dataset-specific instruction text, from config
    std::string demos;       // demonstrations blob, may be empty
};

// One LLM call over the full document texts; output parsed into statements.
Answer generate_answer(const std::string& question, const DocRefs& docs,
                       const GenerationInputs& inputs, LlmClient& llm,
                       AnswerSyntax syntax = AnswerSyntax::prose);

} // namespace vergen
