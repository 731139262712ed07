#include "vergen/text.hpp"

#include <doctest.h>

using namespace vergen;

TEST_CASE("tokenize lowercases, strips punctuation and splits") {
    CHECK(text::tokenize("The Cat, sat!") == std::vector<std::string>{"the", "cat", "sat"});
    CHECK(text::tokenize("state-of-the-art") ==
          std::vector<std::string>{"state", "of", "the", "art"});
    CHECK(text::tokenize("").empty());
    CHECK(text::tokenize("  \t \n ").empty());
}

TEST_CASE("tokenize handles unicode punctuation and keeps non-ascii letters") {
    CHECK(text::tokenize("café — bar") ==
          std::vector<std::string>{"café", "bar"});
    CHECK(text::tokenize("“quoted”") == std::vector<std::string>{"quoted"});
}

TEST_CASE("normalize applies the four answer-normalization rules") {
    CHECK(text::normalize("The Eiffel Tower!") == "eiffel tower");
    CHECK(text::normalize("") == "");
    CHECK(text::normalize("A  man,  a plan") == "man plan");
    CHECK(text::normalize("AN Apple") == "apple");
    CHECK(text::normalize("theater") == "theater"); // articles only as whole tokens
}

TEST_CASE("contains_normalized is substring over normalized forms") {
    CHECK(text::contains_normalized("It was in Paris.", "paris"));
    CHECK(text::contains_normalized("the New York City marathon", "New-York City"));
    CHECK_FALSE(text::contains_normalized("It was in Paris.", "london"));
}

TEST_CASE("fnv1a64 is stable") {
    CHECK(text::fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(text::fnv1a64_hex("a") == text::fnv1a64_hex("a"));
    CHECK(text::fnv1a64_hex("a") != text::fnv1a64_hex("b"));
    CHECK(text::fnv1a64_hex("abc").size() == 16);
}
