#pragma once

#include "vergen/errors.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string_view>

#include <unistd.h>

namespace vergen::detail {

// Write-to-temp then rename, so concurrent writers of the same path never
// interleave and readers never see a partial record.
inline void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
    static std::atomic<unsigned> counter{0};
    const auto tmp = path.parent_path() /
                     (path.filename().string() + ".tmp" +
                      std::to_string(counter.fetch_add(1)) + "." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
        if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
        out << content;
        if (!out.good()) throw Error(ErrorKind::Io, "short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

} // namespace vergen::detail
