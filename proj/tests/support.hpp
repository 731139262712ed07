#pragma once

#include "vergen/corpus.hpp"
#include "vergen/llm.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace vergen_test {

// LLM test double backed by a function; logs like the scripted mock.
class FnLlm final : public vergen::LlmClient {
public:
    using Fn = std::function<std::string(const vergen::LlmRequest&)>;

    explicit FnLlm(Fn fn) : fn_(std::move(fn)) {}

    vergen::LlmResponse complete(const vergen::LlmRequest& request) override {
        vergen::LlmResponse response;
        response.text = fn_(request);
        {
            std::lock_guard<std::mutex> lock(mu_);
            log_.push_back({request.tag, request.user_content, response.text});
        }
        return response;
    }

    std::vector<vergen::LlmCallRecord> call_log() const {
        std::lock_guard<std::mutex> lock(mu_);
        return log_;
    }

    std::size_t call_count(vergen::LlmTag tag) const {
        std::lock_guard<std::mutex> lock(mu_);
        std::size_t count = 0;
        for (const auto& rec : log_) {
            if (rec.tag == tag) ++count;
        }
        return count;
    }

private:
    Fn fn_;
    mutable std::mutex mu_;
    std::vector<vergen::LlmCallRecord> log_;
};

inline vergen::Document doc(std::string id, std::string title, std::string text) {
    vergen::Document d;
    d.id = std::move(id);
    d.title = std::move(title);
    d.text = std::move(text);
    return d;
}

inline vergen::DocRefs refs(const std::vector<vergen::Document>& docs) {
    vergen::DocRefs out;
    out.reserve(docs.size());
    for (const auto& d : docs) out.push_back(&d);
    return out;
}

// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        static std::atomic<int> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("vergen_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

inline void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc);
    out << content;
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

} // namespace vergen_test
