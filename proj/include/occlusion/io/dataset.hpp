#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "occlusion/core/spec.hpp"
#include "occlusion/error.hpp"
#include "occlusion/io/files.hpp"

namespace occlusion {

enum class Modality { Camera, Radar, Lidar };

inline constexpr std::string_view to_string(Modality m) noexcept {
    switch (m) {
        case Modality::Camera: return "camera";
        case Modality::Radar: return "radar";
        case Modality::Lidar: return "lidar";
    }
    return "unknown";
}

using ModalitySet = std::set<Modality>;

inline const ModalitySet& all_modalities() {
    static const ModalitySet all{Modality::Camera, Modality::Radar, Modality::Lidar};
    return all;
}

// One sensor file under samples/<CHANNEL>/ or sweeps/<CHANNEL>/.
struct DatasetEntry {
    Modality modality = Modality::Camera;
    std::string channel;
    std::string relpath;
    std::uintmax_t byte_length = 0;

    bool operator==(const DatasetEntry&) const = default;
};

inline std::optional<Modality> classify_channel(std::string_view channel) noexcept {
    if (channel.starts_with("CAM_")) return Modality::Camera;
    if (channel.starts_with("RADAR_")) return Modality::Radar;
    if (channel.starts_with("LIDAR_")) return Modality::Lidar;
    return std::nullopt;
}

inline bool has_expected_extension(Modality m, std::string_view name) noexcept {
    switch (m) {
        case Modality::Camera:
            return name.ends_with(".jpg") || name.ends_with(".jpeg") || name.ends_with(".png") ||
                   name.ends_with(".JPG") || name.ends_with(".JPEG") || name.ends_with(".PNG");
        case Modality::Radar: return name.ends_with(".pcd");
        case Modality::Lidar: return name.ends_with(".bin");
    }
    return false;
}

struct ScanResult {
    std::vector<DatasetEntry> entries;
    std::vector<std::string> warnings;
};

// Lists sensor files under root/{samples,sweeps}/<CHANNEL>/, sorted by
// relpath (byte order). Unknown channel directories and unexpected files are
// skipped with a warning.
inline ScanResult scan_dataset_detailed(const std::filesystem::path& root,
                                        const ModalitySet& filter = all_modalities()) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw IoError("dataset root does not exist: " + root.string());
    ScanResult result;
    for (const char* split : {"samples", "sweeps"}) {
        const fs::path split_dir = root / split;
        if (!fs::is_directory(split_dir, ec)) continue;
        for (const auto& channel_dir : fs::directory_iterator(split_dir)) {
            const std::string channel = channel_dir.path().filename().string();
            if (!channel_dir.is_directory()) continue;
            const auto modality = classify_channel(channel);
            if (!modality) {
                result.warnings.push_back("skipping unknown channel directory " + std::string(split) + "/" + channel);
                continue;
            }
            if (!filter.contains(*modality)) continue;
            for (const auto& file : fs::directory_iterator(channel_dir.path())) {
                if (!file.is_regular_file()) continue;
                const std::string name = file.path().filename().string();
                if (name.starts_with(".") || name.ends_with(".partial")) continue;
                if (!has_expected_extension(*modality, name)) {
                    result.warnings.push_back("skipping unexpected file " + std::string(split) + "/" + channel + "/" + name);
                    continue;
                }
                result.entries.push_back({*modality, channel, std::string(split) + "/" + channel + "/" + name,
                                          file.file_size()});
            }
        }
    }
    std::sort(result.entries.begin(), result.entries.end(),
              [](const DatasetEntry& a, const DatasetEntry& b) { return a.relpath < b.relpath; });
    return result;
}

inline std::vector<DatasetEntry> scan_dataset(const std::filesystem::path& root,
                                              const ModalitySet& filter = all_modalities()) {
    return scan_dataset_detailed(root, filter).entries;
}

// output_root / relpath, creating parent directories.
inline std::filesystem::path mirror_output_path(std::string_view relpath, const std::filesystem::path& output_root) {
    validate_relpath(relpath);
    const std::filesystem::path out = output_root / std::filesystem::path(std::string(relpath));
    std::error_code ec;
    std::filesystem::create_directories(out.parent_path(), ec);
    if (ec) throw IoError("cannot create " + out.parent_path().string() + ": " + ec.message());
    return out;
}

inline std::filesystem::path mirror_output_path(const DatasetEntry& entry, const std::filesystem::path& output_root) {
    return mirror_output_path(entry.relpath, output_root);
}

// nuScenes file names look like <log>__<CHANNEL>__<timestamp>.<ext>.
struct SensorFileName {
    std::string log;
    std::string channel;
    std::int64_t timestamp = 0;
};

inline std::optional<SensorFileName> parse_sensor_file_name(std::string_view name) {
    const std::size_t first = name.find("__");
    if (first == std::string_view::npos) return std::nullopt;
    const std::size_t second = name.find("__", first + 2);
    if (second == std::string_view::npos) return std::nullopt;
    std::string_view stamp = name.substr(second + 2);
    stamp = stamp.substr(0, stamp.find('.'));
    std::int64_t ts = 0;
    auto [ptr, ec] = std::from_chars(stamp.data(), stamp.data() + stamp.size(), ts);
    if (ec != std::errc() || ptr != stamp.data() + stamp.size()) return std::nullopt;
    return SensorFileName{std::string(name.substr(0, first)), std::string(name.substr(first + 2, second - first - 2)), ts};
}

// Radar files of one acquisition instant, keyed by sensor.
struct RadarFrame {
    std::string key;  // relpath of the anchoring RADAR_FRONT file
    std::map<RadarSensor, std::vector<DatasetEntry>> files;

    bool complete() const {
        if (files.size() != kAllRadarSensors.size()) return false;
        return std::all_of(files.begin(), files.end(), [](const auto& kv) { return kv.second.size() == 1; });
    }
};

struct RadarGrouping {
    std::vector<RadarFrame> frames;
    std::vector<DatasetEntry> orphans;  // radar files that could not be attached to a frame
};

// Groups radar files into frames. Within each (split, log) the RADAR_FRONT
// files anchor frames; every other radar file joins the anchor with the
// nearest timestamp (earlier anchor on ties).
inline RadarGrouping group_radar_frames(const std::vector<DatasetEntry>& entries) {
    struct Item {
        DatasetEntry entry;
        RadarSensor sensor;
        std::int64_t timestamp;
    };
    std::map<std::string, std::vector<Item>> groups;
    RadarGrouping out;
    for (const auto& e : entries) {
        if (e.modality != Modality::Radar) continue;
        const std::string name = e.relpath.substr(e.relpath.rfind('/') + 1);
        const auto parsed = parse_sensor_file_name(name);
        std::optional<RadarSensor> sensor;
        try {
            sensor = parse_radar_sensor(e.channel);
        } catch (const ParameterError&) {
        }
        if (!parsed || !sensor) {
            out.orphans.push_back(e);
            continue;
        }
        const std::string split = e.relpath.substr(0, e.relpath.find('/'));
        groups[split + "/" + parsed->log].push_back({e, *sensor, parsed->timestamp});
    }
    for (auto& [group_key, items] : groups) {
        std::vector<const Item*> anchors;
        for (const auto& it : items)
            if (it.sensor == RadarSensor::Front) anchors.push_back(&it);
        std::sort(anchors.begin(), anchors.end(), [](const Item* a, const Item* b) {
            return a->timestamp != b->timestamp ? a->timestamp < b->timestamp : a->entry.relpath < b->entry.relpath;
        });
        if (anchors.empty()) {
            for (const auto& it : items) out.orphans.push_back(it.entry);
            continue;
        }
        std::vector<RadarFrame> frames(anchors.size());
        for (std::size_t i = 0; i < anchors.size(); ++i) frames[i].key = anchors[i]->entry.relpath;
        for (const auto& it : items) {
            std::size_t best = 0;
            std::int64_t best_gap = -1;
            for (std::size_t i = 0; i < anchors.size(); ++i) {
                const std::int64_t gap = it.timestamp > anchors[i]->timestamp ? it.timestamp - anchors[i]->timestamp
                                                                             : anchors[i]->timestamp - it.timestamp;
                if (best_gap < 0 || gap < best_gap) {
                    best = i;
                    best_gap = gap;
                }
            }
            if (it.sensor == RadarSensor::Front) {
                // anchors belong to their own frame
                for (std::size_t i = 0; i < anchors.size(); ++i)
                    if (anchors[i] == &it) best = i;
            }
            frames[best].files[it.sensor].push_back(it.entry);
        }
        for (auto& f : frames) {
            for (auto& [s, list] : f.files)
                std::sort(list.begin(), list.end(),
                          [](const DatasetEntry& a, const DatasetEntry& b) { return a.relpath < b.relpath; });
            out.frames.push_back(std::move(f));
        }
    }
    std::sort(out.frames.begin(), out.frames.end(),
              [](const RadarFrame& a, const RadarFrame& b) { return a.key < b.key; });
    return out;
}

}  // namespace occlusion
