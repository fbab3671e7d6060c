#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "occlusion/core/spec.hpp"
#include "occlusion/error.hpp"

namespace occlusion {

// Provenance of one written output file.
struct ManifestRecord {
    std::string source_relpath;
    std::string output_relpath;
    OcclusionSpec spec;
    std::uint64_t derived_seed = 0;
    std::uint64_t input_checksum = 0;
    std::uint64_t output_checksum = 0;
    std::optional<double> ssim;

    bool operator==(const ManifestRecord&) const = default;
};

namespace detail {

inline std::string hex64(std::uint64_t v) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, v >>= 4) out[static_cast<std::size_t>(i)] = digits[v & 0xf];
    return out;
}

inline std::uint64_t parse_hex64(const std::string& s) {
    if (s.empty() || s.size() > 16) throw ValidationError("bad checksum '" + s + "'");
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v, 16);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw ValidationError("bad checksum '" + s + "'");
    return v;
}

}  // namespace detail

// Checksums are rendered as 16-digit hex strings: JSON numbers are not
// reliably 64-bit across consumers.
inline nlohmann::json to_json(const ManifestRecord& r) {
    nlohmann::json j;
    j["source"] = r.source_relpath;
    j["output"] = r.output_relpath;
    j["spec"] = r.spec;
    j["derived_seed"] = r.derived_seed;
    j["input_checksum"] = detail::hex64(r.input_checksum);
    j["output_checksum"] = detail::hex64(r.output_checksum);
    if (r.ssim) j["ssim"] = *r.ssim;
    return j;
}

inline ManifestRecord manifest_record_from_json(const nlohmann::json& j) {
    try {
        ManifestRecord r;
        r.source_relpath = j.at("source").get<std::string>();
        r.output_relpath = j.at("output").get<std::string>();
        r.spec = spec_from_json(j.at("spec"));
        r.derived_seed = j.at("derived_seed").get<std::uint64_t>();
        r.input_checksum = detail::parse_hex64(j.at("input_checksum").get<std::string>());
        r.output_checksum = detail::parse_hex64(j.at("output_checksum").get<std::string>());
        if (j.contains("ssim")) r.ssim = j.at("ssim").get<double>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("malformed manifest record: ") + e.what());
    }
}

// One compact JSON document per line.
inline std::string to_manifest_line(const ManifestRecord& r) { return to_json(r).dump() + "\n"; }

inline std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open manifest " + path.string());
    std::vector<ManifestRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": invalid JSON");
        records.push_back(manifest_record_from_json(j));
    }
    return records;
}

// Append-only writer. Not thread-safe: a single consumer owns it.
class ManifestWriter {
public:
    explicit ManifestWriter(const std::filesystem::path& path, bool truncate = false)
        : out_(path, truncate ? std::ios::trunc | std::ios::out : std::ios::app | std::ios::out) {
        if (!out_) throw IoError("cannot open manifest for writing: " + path.string());
    }

    void append(const ManifestRecord& record) {
        out_ << to_manifest_line(record);
        out_.flush();
        if (!out_) throw IoError("manifest write failed");
    }

private:
    std::ofstream out_;
};

}  // namespace occlusion
