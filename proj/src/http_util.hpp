#pragma once

#include "vergen/errors.hpp"

#include <condition_variable>
#include <mutex>
#include <string>
#include <string_view>

namespace vergen::detail {

struct ParsedUrl {
    std::string base; // scheme://host[:port]
    std::string path; // leading '/', default "/"
};

inline ParsedUrl parse_url(std::string_view url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) {
        throw Error(ErrorKind::Config, "invalid URL (missing scheme): " + std::string(url));
    }
    auto path_start = url.find('/', scheme_end + 3);
    ParsedUrl out;
    if (path_start == std::string_view::npos) {
        out.base = std::string(url);
        out.path = "/";
    } else {
        out.base = std::string(url.substr(0, path_start));
        out.path = std::string(url.substr(path_start));
    }
    return out;
}

// Bounds in-flight requests.
class Semaphore {
public:
    explicit Semaphore(int count) : count_(count > 0 ? count : 1) {}

    void acquire() {
        std::unique_lock<std::mutex> lock(mu_);
        cv_.wait(lock, [&] { return count_ > 0; });
        --count_;
    }
    void release() {
        {
            std::lock_guard<std::mutex> lock(mu_);
            ++count_;
        }
        cv_.notify_one();
    }

private:
    std::mutex mu_;
    std::condition_variable cv_;
    int count_;
};

struct SemaphoreGuard {
    explicit SemaphoreGuard(Semaphore& s) : sem(s) { sem.acquire(); }
    ~SemaphoreGuard() { sem.release(); }
    Semaphore& sem;
};

} // namespace vergen::detail
