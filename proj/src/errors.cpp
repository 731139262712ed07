#include "vergen/errors.hpp"

namespace vergen {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return "config";
        case ErrorKind::Corpus: return "corpus";
        case ErrorKind::Dataset: return "dataset";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Llm: return "llm";
        case ErrorKind::Transport: return "transport";
        case ErrorKind::Validation: return "validation";
        case ErrorKind::NotFound: return "not-found";
        case ErrorKind::Io: return "io";
    }
    return "unknown";
}

} // namespace vergen
