#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace vergen::text {

// Retrieval tokenization: lowercase, punctuation mapped to whitespace,
// whitespace split. No stemming, no stopword removal.
std::vector<std::string> tokenize(std::string_view s);

// Open-domain QA answer normalization: lowercase, strip punctuation,
// drop the articles a/an/the, collapse whitespace.
std::string normalize(std::string_view s);

// Tokens of the normalized form.
std::vector<std::string> normalized_tokens(std::string_view s);

// true iff normalize(needle) is a substring of normalize(haystack).
bool contains_normalized(std::string_view haystack, std::string_view needle);

// Stable 64-bit FNV-1a, used for cache keys and file checksums.
std::uint64_t fnv1a64(std::string_view s);
std::string fnv1a64_hex(std::string_view s);

} // namespace vergen::text
