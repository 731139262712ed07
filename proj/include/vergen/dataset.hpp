#pragma once

#include "vergen/evaluation.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace vergen {

// One question with whatever gold signal the dataset mode provides.
struct DatasetRecord {
    std::string id;
    std::string question;
    AliasSets answers;       // asqa short answers, alias sets
    AliasSets gold_entities; // qampari entities, alias sets
    std::vector<std::string> claims; // eli5 sub-claims
    std::vector<std::string> sub_questions;
};

// JSON-lines: {id, question, answers: [[aliases]], gold_entities: [[aliases]],
// claims: [string], sub_questions: [string]} — all gold fields optional.
std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path);

// The question handed to the pipeline; asqa joins sub-questions with
// newlines to disambiguate the original question.
std::string effective_question(const DatasetRecord& record, DatasetMode mode);

// Gold alias-sets used by gold-oracle verification for this mode.
const AliasSets& oracle_gold(const DatasetRecord& record, DatasetMode mode);

// Validates that the gold fields required by the mode are present.
void validate_for_mode(const std::vector<DatasetRecord>& records, DatasetMode mode,
                       bool require_gold);

} // namespace vergen
