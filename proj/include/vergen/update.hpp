#pragma once

#include "vergen/corpus.hpp"
#include "vergen/llm.hpp"
#include "vergen/retriever.hpp"

#include <string>
#include <vector>

namespace vergen {

struct Window {
    DocRefs candidates;
    int window_index = 0;
};

// Non-overlapping consecutive slices in candidate rank order; the last
// window may be short. Empty input yields no windows.
std::vector<Window> sliding_windows(const DocRefs& candidates, int window_size);

struct SelectionOptions {
    int k = 5;
    bool use_summaries = true;     // render candidates by summary when available
    bool summarize_missing = true; // generate (and cache) missing summaries lazily
    int per_doc_char_budget = 2000;
};

struct SelectStep {
    DocRefs docs;        // the updated supporting set
    bool degraded = false; // no parseable selection, kept previous docs
    bool padded = false;   // under-selection filled from candidate rank order
    std::vector<int> dropped_invalid;
    std::string raw_response;
};

// One selection round over current ∪ window.candidates (current documents
// listed first, 1-based identifiers over the concatenation). The result has
// at most k documents and no duplicates; under-selection is padded with the
// highest-ranked unselected pool documents.
SelectStep progressive_select(const std::string& question, const DocRefs& current,
                              const Window& window, const SelectionOptions& options,
                              LlmClient& llm, SummaryCache* summaries);

struct SelectFold {
    DocRefs docs;
    int selection_calls = 0;
    bool any_degraded = false;
    bool any_padded = false;
};

// Folds progressive_select over sliding_windows(candidates, window_size),
// threading the supporting set through each step.
SelectFold select_over_candidates(const std::string& question, const DocRefs& current,
                                  const DocRefs& candidates, const SelectionOptions& options,
                                  int window_size, LlmClient& llm, SummaryCache* summaries);

struct QueryGen {
    Query query;
    bool fell_back = false; // empty LLM output, original question used instead
};

// One LLM call asking for the missing information as a question or a pseudo
// passage; empty output falls back to the original question.
QueryGen generate_missing_info_query(const std::string& question, const DocRefs& docs,
                                     QueryStyle style, LlmClient& llm, int iteration);

// Pseudo answer passage used as the first iteration's retrieval query.
QueryGen hyde_first_query(const std::string& question, LlmClient& llm);

} // namespace vergen
