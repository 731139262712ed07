#include "vergen/generation.hpp"

#include "vergen/errors.hpp"
#include "vergen/log.hpp"
#include "vergen/prompts.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace vergen {

namespace {

bool is_terminal(char c) { return c == '.' || c == '?' || c == '!'; }

// Word immediately preceding position pos (alphanumerics and internal dots).
std::string word_before(std::string_view s, std::size_t pos) {
    std::size_t end = pos;
    std::size_t begin = end;
    while (begin > 0) {
        char c = s[begin - 1];
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '.') {
            --begin;
        } else {
            break;
        }
    }
    std::string word(s.substr(begin, end - begin));
    std::transform(word.begin(), word.end(), word.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return word;
}

bool is_abbreviation(const std::string& word) {
    static const std::unordered_set<std::string> known = {
        "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st",  "vs", "etc",
        "e.g", "i.e", "fig", "al", "inc", "ltd", "co", "dept", "est", "approx",
    };
    if (word.size() == 1) return true; // initials like "J."
    return known.count(word) > 0;
}

// Sentences split on terminal punctuation followed by whitespace or end,
// guarded against common abbreviations. Terminal punctuation stays with its
// sentence.
std::vector<std::string> split_sentences(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!is_terminal(s[i])) continue;
        std::size_t j = i;
        while (j + 1 < s.size() && is_terminal(s[j + 1])) ++j; // "?!", "..."
        const bool at_end = j + 1 >= s.size();
        const bool before_space =
            !at_end && std::isspace(static_cast<unsigned char>(s[j + 1]));
        if (!at_end && !before_space) {
            i = j;
            continue;
        }
        if (s[i] == '.' && j == i && is_abbreviation(word_before(s, i))) {
            i = j;
            continue;
        }
        out.emplace_back(s.substr(start, j + 1 - start));
        i = j;
        start = j + 1;
    }
    if (start < s.size()) out.emplace_back(s.substr(start));
    return out;
}

struct MarkerScan {
    std::vector<int> in_range;  // deduplicated, extraction order
    std::string without_markers;
    bool saw_out_of_range = false;
};

MarkerScan scan_markers(std::string_view s, int doc_count) {
    MarkerScan scan;
    std::unordered_set<int> seen;
    std::size_t pos = 0;
    while (pos < s.size()) {
        if (s[pos] == '[') {
            std::size_t close = pos + 1;
            long value = 0;
            bool digits = false;
            while (close < s.size() && std::isdigit(static_cast<unsigned char>(s[close]))) {
                value = value * 10 + (s[close] - '0');
                if (value > 100000) value = 100001;
                digits = true;
                ++close;
            }
            if (digits && close < s.size() && s[close] == ']') {
                if (value >= 1 && value <= doc_count) {
                    if (seen.insert(static_cast<int>(value)).second) {
                        scan.in_range.push_back(static_cast<int>(value));
                    }
                } else {
                    scan.saw_out_of_range = true;
                }
                pos = close + 1;
                continue;
            }
        }
        scan.without_markers.push_back(s[pos]);
        ++pos;
    }
    return scan;
}

std::string tidy(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
        if (space && (out.empty() || out.back() == ' ')) continue;
        out.push_back(space ? ' ' : c);
    }
    // no space before closing punctuation
    std::string cleaned;
    cleaned.reserve(out.size());
    for (char c : out) {
        if (!cleaned.empty() && cleaned.back() == ' ' &&
            (c == '.' || c == ',' || c == ';' || c == ':' || c == '?' || c == '!')) {
            cleaned.pop_back();
        }
        cleaned.push_back(c);
    }
    while (!cleaned.empty() && cleaned.back() == ' ') cleaned.pop_back();
    return cleaned;
}

std::vector<std::string> split_entities(std::string_view s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == ',') {
            out.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

} // namespace

std::vector<Statement> parse_cited_text(std::string_view text, int doc_count,
                                        AnswerSyntax syntax) {
    std::vector<std::string> pieces;
    if (syntax == AnswerSyntax::prose) {
        pieces = split_sentences(text);
    } else {
        pieces = split_entities(text);
    }

    std::vector<Statement> statements;
    for (auto& piece : pieces) {
        MarkerScan scan = scan_markers(piece, doc_count);
        std::string body = tidy(scan.without_markers);
        if (syntax == AnswerSyntax::entity_list && !body.empty() && body.back() == '.') {
            body.pop_back();
            while (!body.empty() && body.back() == ' ') body.pop_back();
        }
        if (body.empty()) continue;
        statements.push_back({std::move(body), std::move(scan.in_range)});
    }
    return statements;
}

std::string render_cited_text(const std::vector<Statement>& statements, AnswerSyntax syntax) {
    std::string out;
    if (syntax == AnswerSyntax::entity_list) {
        for (std::size_t i = 0; i < statements.size(); ++i) {
            if (i > 0) out += ", ";
            out += statements[i].text;
            for (int c : statements[i].citations) out += " [" + std::to_string(c) + "]";
        }
        if (!out.empty()) out += ".";
        return out;
    }
    for (std::size_t i = 0; i < statements.size(); ++i) {
        if (i > 0) out += " ";
        std::string body = statements[i].text;
        char terminal = '.';
        if (!body.empty() && is_terminal(body.back())) {
            terminal = body.back();
            body.pop_back();
        }
        out += body;
        for (int c : statements[i].citations) out += " [" + std::to_string(c) + "]";
        out.push_back(terminal);
    }
    return out;
}

Answer generate_answer(const std::string& question, const DocRefs& docs,
                       const GenerationInputs& inputs, LlmClient& llm, AnswerSyntax syntax) {
    if (docs.empty()) {
        throw Error(ErrorKind::Validation, "generate_answer: empty supporting set");
    }

    PromptSlots slots;
    slots.question = question;
    slots.instruction = inputs.instruction;
    slots.demos = inputs.demos;
    slots.documents.reserve(docs.size());
    for (const Document* doc : docs) slots.documents.push_back({doc->title, doc->text});
    RenderedPrompt prompt = render_prompt(LlmTag::generate, slots);

    LlmRequest request;
    request.tag = LlmTag::generate;
    request.system_instruction = std::move(prompt.system_instruction);
    request.user_content = std::move(prompt.user_content);
    request.max_tokens = 1024;
    LlmResponse response = llm.complete(request);

    std::string answer_text = response.text;
    while (!answer_text.empty() &&
           std::isspace(static_cast<unsigned char>(answer_text.back()))) {
        answer_text.pop_back();
    }
    std::size_t lead = 0;
    while (lead < answer_text.size() &&
           std::isspace(static_cast<unsigned char>(answer_text[lead]))) {
        ++lead;
    }
    answer_text.erase(0, lead);
    if (answer_text.empty()) {
        throw Error(ErrorKind::Llm, "generate_answer: empty generation output");
    }

    Answer answer;
    answer.text = answer_text;
    answer.statements = parse_cited_text(answer_text, static_cast<int>(docs.size()), syntax);

    MarkerScan whole = scan_markers(answer_text, static_cast<int>(docs.size()));
    if (whole.saw_out_of_range) {
        log_warn("generation cited documents outside [1, " + std::to_string(docs.size()) +
                 "]; citations dropped");
    }
    return answer;
}

} // namespace vergen
