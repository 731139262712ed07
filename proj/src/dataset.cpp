#include "vergen/dataset.hpp"

#include "vergen/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <unordered_set>

namespace vergen {

using nlohmann::json;

namespace {

AliasSets alias_sets(const json& value, const char* field, std::size_t line_no) {
    AliasSets out;
    if (!value.is_array()) {
        throw Error(ErrorKind::Dataset, "dataset line " + std::to_string(line_no) + ": " +
                                            field + " must be an array of alias arrays");
    }
    for (const auto& aliases : value) {
        std::vector<std::string> set;
        if (aliases.is_string()) {
            set.push_back(aliases.get<std::string>()); // single alias shorthand
        } else if (aliases.is_array()) {
            for (const auto& alias : aliases) set.push_back(alias.get<std::string>());
        } else {
            throw Error(ErrorKind::Dataset, "dataset line " + std::to_string(line_no) + ": " +
                                                field + " entries must be strings or arrays");
        }
        if (!set.empty()) out.push_back(std::move(set));
    }
    return out;
}

} // namespace

std::vector<DatasetRecord> load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open dataset: " + path.string());

    std::vector<DatasetRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::exception& e) {
            throw Error(ErrorKind::Dataset,
                        "dataset line " + std::to_string(line_no) + ": " + e.what());
        }
        DatasetRecord record;
        if (!rec.contains("id") || !rec["id"].is_string() || rec["id"].get<std::string>().empty()) {
            throw Error(ErrorKind::Dataset,
                        "dataset line " + std::to_string(line_no) + ": missing id");
        }
        record.id = rec["id"].get<std::string>();
        if (!rec.contains("question") || !rec["question"].is_string() ||
            rec["question"].get<std::string>().empty()) {
            throw Error(ErrorKind::Dataset, "dataset line " + std::to_string(line_no) +
                                                ": missing question for id " + record.id);
        }
        record.question = rec["question"].get<std::string>();
        if (rec.contains("answers")) record.answers = alias_sets(rec["answers"], "answers", line_no);
        if (rec.contains("gold_entities")) {
            record.gold_entities = alias_sets(rec["gold_entities"], "gold_entities", line_no);
        }
        if (rec.contains("claims")) record.claims = rec["claims"].get<std::vector<std::string>>();
        if (rec.contains("sub_questions")) {
            record.sub_questions = rec["sub_questions"].get<std::vector<std::string>>();
        }
        records.push_back(std::move(record));
    }
    if (records.empty()) throw Error(ErrorKind::Dataset, "empty dataset: " + path.string());

    std::unordered_set<std::string> ids;
    for (const auto& record : records) {
        if (!ids.insert(record.id).second) {
            throw Error(ErrorKind::Dataset, "duplicate question id: " + record.id);
        }
    }
    return records;
}

std::string effective_question(const DatasetRecord& record, DatasetMode mode) {
    if (mode == DatasetMode::asqa && !record.sub_questions.empty()) {
        std::string joined;
        for (const auto& q : record.sub_questions) {
            if (!joined.empty()) joined.push_back('\n');
            joined += q;
        }
        return joined;
    }
    return record.question;
}

const AliasSets& oracle_gold(const DatasetRecord& record, DatasetMode mode) {
    if (mode == DatasetMode::qampari) return record.gold_entities;
    if (!record.answers.empty()) return record.answers;
    return record.gold_entities;
}

void validate_for_mode(const std::vector<DatasetRecord>& records, DatasetMode mode,
                       bool require_gold) {
    if (!require_gold) return;
    for (const auto& record : records) {
        bool ok = true;
        switch (mode) {
            case DatasetMode::asqa: ok = !record.answers.empty(); break;
            case DatasetMode::qampari: ok = !record.gold_entities.empty(); break;
            case DatasetMode::eli5: ok = !record.claims.empty(); break;
            case DatasetMode::generic: ok = true; break;
        }
        if (!ok) {
            throw Error(ErrorKind::Dataset, "dataset record " + record.id +
                                                " lacks the gold fields required by mode " +
                                                to_string(mode));
        }
    }
}

} // namespace vergen
