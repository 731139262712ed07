#include "vergen/parsers.hpp"

#include "vergen/errors.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <unordered_set>

namespace vergen {

namespace {

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

// All bracketed tokens "[...]" with their inner text, left to right.
std::vector<std::string_view> bracketed_tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        auto open = s.find('[', pos);
        if (open == std::string_view::npos) break;
        auto close = s.find(']', open + 1);
        if (close == std::string_view::npos) break;
        out.push_back(s.substr(open + 1, close - open - 1));
        pos = close + 1;
    }
    return out;
}

std::string_view trimmed(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::optional<long> as_integer(std::string_view s) {
    s = trimmed(s);
    if (s.empty()) return std::nullopt;
    std::size_t i = 0;
    bool negative = false;
    if (s[0] == '+' || s[0] == '-') {
        negative = s[0] == '-';
        i = 1;
        if (i == s.size()) return std::nullopt;
    }
    long value = 0;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return std::nullopt;
        value = value * 10 + (s[i] - '0');
        if (value > 1000000) return std::nullopt; // implausible identifier/score
    }
    return negative ? -value : value;
}

// All non-negative integers appearing in s, in order.
std::vector<long> integers_in(std::string_view s) {
    std::vector<long> out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (std::isdigit(static_cast<unsigned char>(s[i]))) {
            long value = 0;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
                value = value * 10 + (s[i] - '0');
                if (value > 1000000) value = 1000001;
                ++i;
            }
            out.push_back(value);
        } else {
            ++i;
        }
    }
    return out;
}

} // namespace

Verdict parse_binary_verdict(std::string_view response) {
    std::optional<Verdict> last;
    for (auto token : bracketed_tokens(response)) {
        token = trimmed(token);
        if (iequals(token, "YES")) last = Verdict::Yes;
        else if (iequals(token, "NO")) last = Verdict::No;
    }
    if (!last) {
        throw Error(ErrorKind::Parse, "no [YES]/[NO] verdict in response");
    }
    return *last;
}

int parse_score(std::string_view response) {
    std::optional<long> last;
    for (auto token : bracketed_tokens(response)) {
        if (auto value = as_integer(token)) last = value;
    }
    if (!last) {
        throw Error(ErrorKind::Parse, "no bracketed score in response");
    }
    if (*last < 0 || *last > 10) {
        throw Error(ErrorKind::Parse, "score " + std::to_string(*last) + " outside [0, 10]");
    }
    return static_cast<int>(*last);
}

SelectionParse parse_selection(std::string_view response, int valid_max, int k) {
    if (valid_max < 1) {
        throw Error(ErrorKind::Validation, "parse_selection: empty identifier space");
    }
    if (k < 1) {
        throw Error(ErrorKind::Validation, "parse_selection: k must be >= 1");
    }

    static constexpr std::string_view kMarker = "Selected Documents:";
    SelectionParse out;

    std::string_view scan = response;
    auto marker = response.rfind(kMarker);
    if (marker != std::string_view::npos) {
        out.marker_found = true;
        scan = response.substr(marker + kMarker.size());
    }

    std::unordered_set<long> seen;
    for (long value : integers_in(scan)) {
        if (!seen.insert(value).second) continue;
        if (value < 1 || value > valid_max) {
            out.dropped_invalid.push_back(static_cast<int>(std::min(value, 1000001L)));
            continue;
        }
        if (out.selected.size() < static_cast<std::size_t>(k)) {
            out.selected.push_back(static_cast<int>(value));
        }
    }
    if (out.selected.empty()) {
        throw Error(ErrorKind::Parse, "no valid identifiers in selection response");
    }
    return out;
}

} // namespace vergen
