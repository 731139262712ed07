#include "vergen/text.hpp"

#include <array>
#include <cctype>

namespace vergen::text {

namespace {

struct Codepoint {
    char32_t value;
    std::size_t length; // bytes consumed
};

// Decodes one UTF-8 codepoint; malformed bytes are passed through one at a
// time as their raw value so nothing is silently dropped.
Codepoint decode_utf8(std::string_view s, std::size_t pos) {
    const auto byte = [&](std::size_t i) -> unsigned char {
        return static_cast<unsigned char>(s[i]);
    };
    unsigned char b0 = byte(pos);
    if (b0 < 0x80) return {b0, 1};

    auto cont = [&](std::size_t i) {
        return i < s.size() && (byte(i) & 0xC0) == 0x80;
    };
    if ((b0 & 0xE0) == 0xC0 && cont(pos + 1)) {
        char32_t cp = (char32_t(b0 & 0x1F) << 6) | (byte(pos + 1) & 0x3F);
        return Codepoint{cp, 2};
    }
    if ((b0 & 0xF0) == 0xE0 && cont(pos + 1) && cont(pos + 2)) {
        char32_t cp = (char32_t(b0 & 0x0F) << 12) | (char32_t(byte(pos + 1) & 0x3F) << 6) |
                      (byte(pos + 2) & 0x3F);
        return Codepoint{cp, 3};
    }
    if ((b0 & 0xF8) == 0xF0 && cont(pos + 1) && cont(pos + 2) && cont(pos + 3)) {
        char32_t cp = (char32_t(b0 & 0x07) << 18) | (char32_t(byte(pos + 1) & 0x3F) << 12) |
                      (char32_t(byte(pos + 2) & 0x3F) << 6) | (byte(pos + 3) & 0x3F);
        return Codepoint{cp, 4};
    }
    return Codepoint{b0, 1};
}

bool is_punct_codepoint(char32_t cp) {
    if (cp < 0x80) return std::ispunct(static_cast<int>(cp)) != 0;
    if (cp >= 0x00A1 && cp <= 0x00BF) return true; // Latin-1 punctuation and signs
    if (cp >= 0x2010 && cp <= 0x2027) return true; // dashes, quotes, bullets
    if (cp >= 0x2030 && cp <= 0x205E) return true; // general punctuation
    if (cp >= 0x3000 && cp <= 0x303F) return true; // CJK punctuation
    if (cp >= 0xFF01 && cp <= 0xFF0F) return true; // fullwidth forms
    if (cp >= 0xFF1A && cp <= 0xFF20) return true;
    if (cp >= 0xFF3B && cp <= 0xFF40) return true;
    if (cp >= 0xFF5B && cp <= 0xFF65) return true;
    return false;
}

bool is_space_codepoint(char32_t cp) {
    if (cp < 0x80) return std::isspace(static_cast<int>(cp)) != 0;
    return cp == 0x00A0 || (cp >= 0x2000 && cp <= 0x200B) || cp == 0x3000;
}

// Lowercases ASCII and maps punctuation/whitespace to single spaces.
std::string fold(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t pos = 0;
    while (pos < s.size()) {
        Codepoint cp = decode_utf8(s, pos);
        if (is_punct_codepoint(cp.value) || is_space_codepoint(cp.value)) {
            out.push_back(' ');
        } else if (cp.value < 0x80) {
            out.push_back(static_cast<char>(std::tolower(static_cast<int>(cp.value))));
        } else {
            out.append(s.substr(pos, cp.length));
        }
        pos += cp.length;
    }
    return out;
}

std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && s[i] == ' ') ++i;
        std::size_t start = i;
        while (i < s.size() && s[i] != ' ') ++i;
        if (i > start) tokens.emplace_back(s.substr(start, i - start));
    }
    return tokens;
}

bool is_article(std::string_view token) {
    return token == "a" || token == "an" || token == "the";
}

} // namespace

std::vector<std::string> tokenize(std::string_view s) {
    return split_ws(fold(s));
}

std::vector<std::string> normalized_tokens(std::string_view s) {
    std::vector<std::string> tokens = tokenize(s);
    std::vector<std::string> kept;
    kept.reserve(tokens.size());
    for (auto& t : tokens) {
        if (!is_article(t)) kept.push_back(std::move(t));
    }
    return kept;
}

std::string normalize(std::string_view s) {
    std::string out;
    for (const auto& t : normalized_tokens(s)) {
        if (!out.empty()) out.push_back(' ');
        out += t;
    }
    return out;
}

bool contains_normalized(std::string_view haystack, std::string_view needle) {
    return normalize(haystack).find(normalize(needle)) != std::string::npos;
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string fnv1a64_hex(std::string_view s) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a64(s);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

} // namespace vergen::text
