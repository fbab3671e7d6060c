#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "occlusion/error.hpp"

namespace occlusion {

inline std::vector<std::byte> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    in.seekg(0, std::ios::end);
    const std::streamoff size = in.tellg();
    if (size < 0) throw IoError("cannot stat " + path.string());
    in.seekg(0);
    std::vector<std::byte> bytes(static_cast<std::size_t>(size));
    if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), size))
        throw IoError("short read on " + path.string());
    return bytes;
}

// Writes to "<path>.partial" and renames over the destination, so a crash
// never leaves a truncated file under the final name.
inline void write_file_atomic(const std::filesystem::path& path, std::span<const std::byte> bytes) {
    std::filesystem::path tmp = path;
    tmp += ".partial";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

// Relative, forward-slash, no "." / ".." / empty components.
inline void validate_relpath(std::string_view relpath) {
    if (relpath.empty()) throw ValidationError("empty relative path");
    if (relpath.front() == '/') throw ValidationError("path must be relative: '" + std::string(relpath) + "'");
    if (relpath.find('\\') != std::string_view::npos)
        throw ValidationError("path must use forward slashes: '" + std::string(relpath) + "'");
    if (relpath.find(':') != std::string_view::npos)
        throw ValidationError("path must not contain a drive or scheme: '" + std::string(relpath) + "'");
    std::size_t start = 0;
    while (start <= relpath.size()) {
        const std::size_t end = std::min(relpath.find('/', start), relpath.size());
        const std::string_view part = relpath.substr(start, end - start);
        if (part.empty() || part == "." || part == "..")
            throw ValidationError("invalid path component in '" + std::string(relpath) + "'");
        start = end + 1;
    }
}

// Relative path of `path` under `root`, forward slashes.
inline std::string relpath_under(const std::filesystem::path& root, const std::filesystem::path& path) {
    return path.lexically_relative(root).generic_string();
}

inline std::vector<std::byte> to_bytes(std::string_view s) {
    std::vector<std::byte> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = static_cast<std::byte>(s[i]);
    return out;
}

}  // namespace occlusion
