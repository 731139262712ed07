#include "vergen/update.hpp"

#include "vergen/errors.hpp"
#include "vergen/log.hpp"
#include "vergen/parsers.hpp"
#include "vergen/prompts.hpp"

#include <algorithm>
#include <unordered_set>

namespace vergen {

std::vector<Window> sliding_windows(const DocRefs& candidates, int window_size) {
    if (window_size < 1) {
        throw Error(ErrorKind::Validation, "sliding_windows: window size must be >= 1");
    }
    std::vector<Window> windows;
    const auto w = static_cast<std::size_t>(window_size);
    for (std::size_t start = 0; start < candidates.size(); start += w) {
        Window window;
        window.window_index = static_cast<int>(windows.size());
        const std::size_t end = std::min(candidates.size(), start + w);
        window.candidates.assign(candidates.begin() + static_cast<std::ptrdiff_t>(start),
                                 candidates.begin() + static_cast<std::ptrdiff_t>(end));
        windows.push_back(std::move(window));
    }
    return windows;
}

namespace {

std::string truncated_body(const std::string& body, int budget, const std::string& doc_id) {
    if (budget <= 0 || body.size() <= static_cast<std::size_t>(budget)) return body;
    log_warn("selection prompt: truncating document " + doc_id + " to " +
             std::to_string(budget) + " chars");
    return body.substr(0, static_cast<std::size_t>(budget));
}

DocForPrompt render_candidate(const Document& doc, const SelectionOptions& options,
                              LlmClient& llm, SummaryCache* summaries) {
    std::string body = doc.text;
    if (options.use_summaries) {
        if (doc.summary) {
            body = *doc.summary;
        } else if (summaries != nullptr) {
            if (auto cached = summaries->lookup(doc.id, summarize_prompt_hash())) {
                body = std::move(*cached);
            } else if (options.summarize_missing) {
                body = *summarize_document(doc, llm, *summaries).summary;
            }
        }
    }
    return {doc.title, truncated_body(body, options.per_doc_char_budget, doc.id)};
}

} // namespace

SelectStep progressive_select(const std::string& question, const DocRefs& current,
                              const Window& window, const SelectionOptions& options,
                              LlmClient& llm, SummaryCache* summaries) {
    if (options.k < 1) throw Error(ErrorKind::Validation, "progressive_select: k must be >= 1");
    if (current.size() > static_cast<std::size_t>(options.k)) {
        throw Error(ErrorKind::Validation, "progressive_select: |current| exceeds k");
    }
    if (window.candidates.empty()) {
        throw Error(ErrorKind::Validation, "progressive_select: empty window");
    }

    // Current documents first, then the window slice; identifiers restart at 1.
    DocRefs pool = current;
    pool.insert(pool.end(), window.candidates.begin(), window.candidates.end());

    PromptSlots slots;
    slots.question = question;
    slots.k = options.k;
    slots.documents.reserve(pool.size());
    for (const Document* doc : pool) {
        slots.documents.push_back(render_candidate(*doc, options, llm, summaries));
    }
    RenderedPrompt prompt = render_prompt(LlmTag::select, slots);

    LlmRequest request;
    request.tag = LlmTag::select;
    request.system_instruction = std::move(prompt.system_instruction);
    request.user_content = std::move(prompt.user_content);
    request.max_tokens = 128;
    LlmResponse response = llm.complete(request);

    SelectStep step;
    step.raw_response = response.text;

    SelectionParse parse;
    try {
        parse = parse_selection(response.text, static_cast<int>(pool.size()), options.k);
    } catch (const Error&) {
        log_warn("selection produced no usable identifiers; keeping current documents");
        step.docs = current;
        step.degraded = true;
        return step;
    }
    step.dropped_invalid = parse.dropped_invalid;
    if (!parse.dropped_invalid.empty()) {
        log_warn("selection returned " + std::to_string(parse.dropped_invalid.size()) +
                 " out-of-range identifier(s)");
    }

    std::unordered_set<const Document*> chosen;
    for (int id : parse.selected) {
        const Document* doc = pool[static_cast<std::size_t>(id - 1)];
        if (chosen.insert(doc).second) step.docs.push_back(doc);
    }

    // Pad under-selection from pool rank order (current first, then window).
    const std::size_t target = std::min(pool.size(), static_cast<std::size_t>(options.k));
    if (step.docs.size() < target) {
        for (const Document* doc : pool) {
            if (step.docs.size() >= target) break;
            if (chosen.insert(doc).second) step.docs.push_back(doc);
        }
        step.padded = true;
        log_warn("selection returned fewer than k documents; padded from candidate order");
    }
    return step;
}

SelectFold select_over_candidates(const std::string& question, const DocRefs& current,
                                  const DocRefs& candidates, const SelectionOptions& options,
                                  int window_size, LlmClient& llm, SummaryCache* summaries) {
    SelectFold fold;
    fold.docs = current;
    for (const Window& window : sliding_windows(candidates, window_size)) {
        SelectStep step = progressive_select(question, fold.docs, window, options, llm, summaries);
        fold.docs = std::move(step.docs);
        ++fold.selection_calls;
        fold.any_degraded = fold.any_degraded || step.degraded;
        fold.any_padded = fold.any_padded || step.padded;
    }
    return fold;
}

namespace {

std::string stripped(std::string s) {
    auto issp = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
    std::size_t begin = 0;
    while (begin < s.size() && issp(s[begin])) ++begin;
    std::size_t end = s.size();
    while (end > begin && issp(s[end - 1])) --end;
    return s.substr(begin, end - begin);
}

QueryGen query_from_llm(LlmTag tag, QueryStyle style, const std::string& question,
                        const DocRefs& docs, LlmClient& llm, int iteration) {
    PromptSlots slots;
    slots.question = question;
    slots.documents.reserve(docs.size());
    for (const Document* doc : docs) slots.documents.push_back({doc->title, doc->text});
    RenderedPrompt prompt = render_prompt(tag, slots);

    LlmRequest request;
    request.tag = tag;
    request.system_instruction = std::move(prompt.system_instruction);
    request.user_content = std::move(prompt.user_content);
    request.max_tokens = 512;
    LlmResponse response = llm.complete(request);

    QueryGen out;
    std::string query_text = stripped(response.text);
    if (query_text.empty()) {
        log_warn("empty query generation output; falling back to the original question");
        out.query = Query{question, QueryStyle::original_question, iteration};
        out.fell_back = true;
        return out;
    }
    out.query = Query{std::move(query_text), style, iteration};
    return out;
}

} // namespace

QueryGen generate_missing_info_query(const std::string& question, const DocRefs& docs,
                                     QueryStyle style, LlmClient& llm, int iteration) {
    if (docs.empty()) {
        throw Error(ErrorKind::Validation,
                    "generate_missing_info_query: no current documents (first iteration "
                    "queries with the question itself)");
    }
    LlmTag tag;
    if (style == QueryStyle::missing_passage) {
        tag = LlmTag::missing_query_passage;
    } else if (style == QueryStyle::missing_question) {
        tag = LlmTag::missing_query_question;
    } else {
        throw Error(ErrorKind::Validation, "generate_missing_info_query: style must be "
                                           "missing_question or missing_passage");
    }
    return query_from_llm(tag, style, question, docs, llm, iteration);
}

QueryGen hyde_first_query(const std::string& question, LlmClient& llm) {
    // A pseudo passage written with no supporting documents; the passage
    // template handles the empty list.
    return query_from_llm(LlmTag::missing_query_passage, QueryStyle::hyde_passage, question, {},
                          llm, 1);
}

} // namespace vergen
