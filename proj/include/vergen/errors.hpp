#pragma once

#include <stdexcept>
#include <string>

namespace vergen {

enum class ErrorKind {
    Config,     // bad configuration or CLI usage
    Corpus,     // corpus file problems (malformed record, duplicate id, ...)
    Dataset,    // dataset file problems
    Parse,      // unparseable LLM output
    Llm,        // LLM client failure (scripted-mock miss, exhausted retries)
    Transport,  // network-level failure (retryable class)
    Validation, // violated invariant or precondition
    NotFound,   // missing id / file
    Io,         // filesystem errors
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace vergen
