#include "vergen/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <string>

namespace vergen {

namespace {

enum class Level { Quiet = 0, Warn = 1, Info = 2 };

Level log_level() {
    static Level level = [] {
        const char* env = std::getenv("VERGEN_LOG");
        if (env == nullptr) return Level::Warn;
        std::string v(env);
        if (v == "quiet") return Level::Quiet;
        if (v == "info") return Level::Info;
        return Level::Warn;
    }();
    return level;
}

std::mutex& log_mutex() {
    static std::mutex mu;
    return mu;
}

void emit(const char* prefix, std::string_view message) {
    std::lock_guard<std::mutex> lock(log_mutex());
    std::fprintf(stderr, "%s %.*s\n", prefix, static_cast<int>(message.size()), message.data());
}

} // namespace

void log_warn(std::string_view message) {
    if (log_level() >= Level::Warn) emit("[vergen:warn]", message);
}

void log_info(std::string_view message) {
    if (log_level() >= Level::Info) emit("[vergen:info]", message);
}

} // namespace vergen
