#pragma once

#include <charconv>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "occlusion/error.hpp"
#include "occlusion/pointcloud/point_cloud.hpp"

namespace occlusion {

// Parsed header of a PCD file. Only the binary data mode is supported;
// nuScenes radar sweeps use it.
struct PcdHeader {
    std::string version = "0.7";
    std::vector<FieldSpec> fields;
    std::size_t width = 0;
    std::size_t height = 1;
    std::string viewpoint = "0 0 0 1 0 0 0";
    std::size_t points = 0;
    std::string data = "binary";

    std::size_t record_size() const noexcept {
        std::size_t total = 0;
        for (const auto& f : fields) total += f.width();
        return total;
    }
};

struct PcdDocument {
    PcdHeader header;
    PointCloud cloud;
};

namespace detail {

inline constexpr std::size_t kMaxPcdHeaderBytes = 1 << 16;
inline constexpr std::size_t kMaxPcdFields = 4096;

inline std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        const std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) out.push_back(line.substr(start, i - start));
    }
    return out;
}

inline std::size_t parse_count(std::string_view token, const char* key, std::size_t offset) {
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw MalformedFileError(std::string("PCD ") + key + ": invalid integer '" + std::string(token) + "'", offset);
    return value;
}

inline std::string join_tokens(std::span<const std::string_view> tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out += ' ';
        out += tokens[i];
    }
    return out;
}

}  // namespace detail

// Parses the ASCII header. Returns the header and the byte offset where the
// binary payload starts.
inline std::pair<PcdHeader, std::size_t> read_pcd_header(std::span<const std::byte> bytes) {
    PcdHeader header;
    std::vector<std::string_view> names, sizes, types, counts;
    bool have_width = false, have_height = false, have_points = false, have_data = false;
    std::size_t pos = 0;
    const std::string_view text(reinterpret_cast<const char*>(bytes.data()), bytes.size());

    while (!have_data) {
        if (pos >= text.size()) throw MalformedFileError("PCD header ends before DATA line", pos);
        if (pos > detail::kMaxPcdHeaderBytes) throw MalformedFileError("PCD header too long", pos);
        const std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) throw MalformedFileError("PCD header line not terminated", pos);
        std::string_view line = text.substr(pos, eol - pos);
        const std::size_t line_offset = pos;
        pos = eol + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        for (char c : line)
            if (static_cast<unsigned char>(c) < 0x20 && c != '\t')
                throw MalformedFileError("PCD header contains control bytes", line_offset);
        const auto tokens = detail::split_ws(line);
        if (tokens.empty() || tokens.front().starts_with("#")) continue;
        const std::string_view key = tokens.front();
        const auto args = std::span(tokens).subspan(1);

        auto need_one = [&](const char* k) {
            if (args.size() != 1) throw MalformedFileError(std::string("PCD ") + k + " expects one value", line_offset);
        };
        if (key == "VERSION") {
            need_one("VERSION");
            header.version = std::string(args[0]);
        } else if (key == "FIELDS" || key == "COLUMNS") {
            names.assign(args.begin(), args.end());
        } else if (key == "SIZE") {
            sizes.assign(args.begin(), args.end());
        } else if (key == "TYPE") {
            types.assign(args.begin(), args.end());
        } else if (key == "COUNT") {
            counts.assign(args.begin(), args.end());
        } else if (key == "WIDTH") {
            need_one("WIDTH");
            header.width = detail::parse_count(args[0], "WIDTH", line_offset);
            have_width = true;
        } else if (key == "HEIGHT") {
            need_one("HEIGHT");
            header.height = detail::parse_count(args[0], "HEIGHT", line_offset);
            have_height = true;
        } else if (key == "VIEWPOINT") {
            if (args.size() != 7) throw MalformedFileError("PCD VIEWPOINT expects seven values", line_offset);
            header.viewpoint = detail::join_tokens(args);
        } else if (key == "POINTS") {
            need_one("POINTS");
            header.points = detail::parse_count(args[0], "POINTS", line_offset);
            have_points = true;
        } else if (key == "DATA") {
            need_one("DATA");
            header.data = std::string(args[0]);
            have_data = true;
            if (header.data == "ascii" || header.data == "binary_compressed")
                throw UnsupportedFormatError("PCD data mode '" + header.data + "' is not supported; only binary");
            if (header.data != "binary")
                throw MalformedFileError("PCD unknown data mode '" + header.data + "'", line_offset);
        } else {
            throw MalformedFileError("PCD unknown header key '" + std::string(key) + "'", line_offset);
        }
    }

    if (names.empty()) throw MalformedFileError("PCD header lacks FIELDS", 0);
    if (names.size() > detail::kMaxPcdFields) throw MalformedFileError("PCD declares too many fields", 0);
    if (sizes.size() != names.size() || types.size() != names.size())
        throw MalformedFileError("PCD FIELDS/SIZE/TYPE lengths differ (" + std::to_string(names.size()) + "/" +
                                     std::to_string(sizes.size()) + "/" + std::to_string(types.size()) + ")",
                                 0);
    if (!counts.empty() && counts.size() != names.size())
        throw MalformedFileError("PCD COUNT length differs from FIELDS", 0);
    if (!have_width) throw MalformedFileError("PCD header lacks WIDTH", 0);

    for (std::size_t i = 0; i < names.size(); ++i) {
        FieldSpec f;
        f.name = std::string(names[i]);
        const std::size_t size = detail::parse_count(sizes[i], "SIZE", 0);
        if (size != 1 && size != 2 && size != 4 && size != 8)
            throw MalformedFileError("PCD field '" + f.name + "' has unsupported size " + std::to_string(size), 0);
        f.size = static_cast<int>(size);
        if (types[i] == "F")
            f.kind = ScalarKind::Float;
        else if (types[i] == "I")
            f.kind = ScalarKind::Signed;
        else if (types[i] == "U")
            f.kind = ScalarKind::Unsigned;
        else
            throw MalformedFileError("PCD field '" + f.name + "' has unknown type '" + std::string(types[i]) + "'", 0);
        if (f.kind == ScalarKind::Float && f.size != 4 && f.size != 8)
            throw MalformedFileError("PCD float field '" + f.name + "' must have size 4 or 8", 0);
        const std::size_t count = counts.empty() ? 1 : detail::parse_count(counts[i], "COUNT", 0);
        if (count == 0 || count > 1'000'000)
            throw MalformedFileError("PCD field '" + f.name + "' has invalid COUNT", 0);
        f.count = static_cast<int>(count);
        header.fields.push_back(std::move(f));
    }

    if (!have_height) header.height = 1;
    if (header.height != 0 && header.width > std::numeric_limits<std::size_t>::max() / header.height)
        throw MalformedFileError("PCD WIDTH x HEIGHT overflows", 0);
    if (!have_points) header.points = header.width * header.height;
    if (header.points != header.width * header.height)
        throw MalformedFileError("PCD POINTS " + std::to_string(header.points) + " != WIDTH x HEIGHT " +
                                     std::to_string(header.width * header.height),
                                 0);
    return {std::move(header), pos};
}

inline PcdDocument read_pcd_document(std::span<const std::byte> bytes) {
    auto [header, offset] = read_pcd_header(bytes);
    const std::size_t record = header.record_size();
    if (header.points > std::numeric_limits<std::size_t>::max() / record)
        throw MalformedFileError("PCD payload size overflows", offset);
    const std::size_t expected = header.points * record;
    const std::size_t actual = bytes.size() - offset;
    if (expected != actual)
        throw MalformedFileError("PCD payload size mismatch: expected " + std::to_string(expected) +
                                     " bytes, got " + std::to_string(actual),
                                 offset);
    try {
        PointCloud cloud(Schema(header.fields), std::vector<std::byte>(bytes.begin() + static_cast<std::ptrdiff_t>(offset), bytes.end()));
        return {std::move(header), std::move(cloud)};
    } catch (const InputError& e) {
        throw MalformedFileError(std::string("PCD schema unusable: ") + e.what(), 0);
    }
}

inline PointCloud read_pcd(std::span<const std::byte> bytes) { return read_pcd_document(bytes).cloud; }

struct PcdWriteOptions {
    std::string version = "0.7";
    std::string viewpoint = "0 0 0 1 0 0 0";
    // Organized layout kept only while width * height equals the point count.
    std::size_t width = 0;
    std::size_t height = 0;

    static PcdWriteOptions from(const PcdHeader& h) { return {h.version, h.viewpoint, h.width, h.height}; }
};

// Normalized header: one space between tokens, fixed key order, DATA binary.
inline std::vector<std::byte> write_pcd(const PointCloud& cloud, const PcdWriteOptions& options = {}) {
    const auto& fields = cloud.schema().fields();
    std::size_t width = cloud.size(), height = 1;
    if (options.height > 0 && options.width * options.height == cloud.size()) {
        width = options.width;
        height = options.height;
    }
    std::string h = "# .PCD v" + options.version + " - Point Cloud Data file format\n";
    h += "VERSION " + options.version + "\nFIELDS";
    for (const auto& f : fields) h += " " + f.name;
    h += "\nSIZE";
    for (const auto& f : fields) h += " " + std::to_string(f.size);
    h += "\nTYPE";
    for (const auto& f : fields) h += std::string(" ") + static_cast<char>(f.kind);
    h += "\nCOUNT";
    for (const auto& f : fields) h += " " + std::to_string(f.count);
    h += "\nWIDTH " + std::to_string(width) + "\nHEIGHT " + std::to_string(height);
    h += "\nVIEWPOINT " + options.viewpoint;
    h += "\nPOINTS " + std::to_string(cloud.size()) + "\nDATA binary\n";

    std::vector<std::byte> out(h.size() + cloud.payload().size());
    for (std::size_t i = 0; i < h.size(); ++i) out[i] = static_cast<std::byte>(h[i]);
    std::copy(cloud.payload().begin(), cloud.payload().end(), out.begin() + static_cast<std::ptrdiff_t>(h.size()));
    return out;
}

inline std::vector<std::byte> write_pcd(const PcdDocument& doc) {
    return write_pcd(doc.cloud, PcdWriteOptions::from(doc.header));
}

}  // namespace occlusion
