#pragma once

#include <string_view>
#include <vector>

namespace vergen {

enum class Verdict { Yes, No };

// Last bracketed [YES]/[NO] token, case-insensitive, surrounding prose
// ignored. Throws Parse when neither token is present.
Verdict parse_binary_verdict(std::string_view response);

// Last bracketed integer; must lie in [0, 10]. Throws Parse otherwise.
int parse_score(std::string_view response);

struct SelectionParse {
    std::vector<int> selected;        // deduplicated, in extraction order, <= k
    std::vector<int> dropped_invalid; // identifiers outside [1, valid_max]
    bool marker_found = false;        // false => fell back to all integers
};

// Identifiers after the last "Selected Documents:" marker (all integers in
// the text when the marker is absent). Valid identifiers are 1..valid_max.
// Throws Parse when no valid identifier can be extracted.
SelectionParse parse_selection(std::string_view response, int valid_max, int k);

} // namespace vergen
