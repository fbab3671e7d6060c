#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "occlusion/camera/image.hpp"
#include "occlusion/core/spec.hpp"
#include "occlusion/error.hpp"
#include "occlusion/io/files.hpp"
#include "occlusion/io/image_codec.hpp"
#include "occlusion/pipeline/parallel.hpp"

namespace occlusion {

// Optional directories of external mask/texture images. Each file is read
// as a single-channel alpha image.
struct AssetDirs {
    std::optional<std::filesystem::path> dirt;
    std::optional<std::filesystem::path> droplets;
    std::optional<std::filesystem::path> scratches;
    std::optional<std::filesystem::path> soiling;
};

struct JobConfig {
    std::filesystem::path dataset_root;
    std::filesystem::path output_root;
    std::uint64_t global_seed = 0;
    std::vector<OcclusionSpec> specs;
    unsigned workers = default_worker_count();
    ImageFormat image_format = ImageFormat::Jpeg;
    int jpeg_quality = kDefaultJpegQuality;
    bool swap_lateral = false;
    bool radar_dropout_all_sensors = false;
    bool compute_ssim = false;
    AssetDirs assets;
};

// Throws UsageError; runs before anything touches the output tree.
inline void validate_config(const JobConfig& cfg) {
    if (cfg.dataset_root.empty()) throw UsageError("dataset_root is required");
    if (cfg.output_root.empty()) throw UsageError("output_root is required");
    const auto a = std::filesystem::weakly_canonical(cfg.dataset_root);
    const auto b = std::filesystem::weakly_canonical(cfg.output_root);
    if (a == b) throw UsageError("dataset_root and output_root must differ");
    if (cfg.specs.empty()) throw UsageError("at least one occlusion spec is required");
    if (cfg.workers < 1) throw UsageError("workers must be >= 1");
    if (cfg.jpeg_quality < 1 || cfg.jpeg_quality > 100) throw UsageError("jpeg_quality must lie in [1, 100]");
    for (const auto& spec : cfg.specs) {
        try {
            validate(spec);
        } catch (const ParameterError& e) {
            throw UsageError(std::string("invalid spec: ") + e.what());
        }
    }
}

// {
//   "dataset_root": "...", "output_root": "...", "global_seed": 42,
//   "workers": 4, "image_format": "jpeg", "jpeg_quality": 95,
//   "swap_lateral": false, "radar_dropout_all_sensors": false,
//   "compute_ssim": false,
//   "assets": {"dirt": "...", "droplets": "...", "scratches": "...", "soiling": "..."},
//   "specs": [{"kind": "dirt", "severity": "light"}, {"kind": "angle_drop", "region": "front", "cone_angle_deg": 30}]
// }
inline JobConfig job_config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw UsageError("job config must be a JSON object");
    JobConfig cfg;
    try {
        if (j.contains("dataset_root")) cfg.dataset_root = j.at("dataset_root").get<std::string>();
        if (j.contains("output_root")) cfg.output_root = j.at("output_root").get<std::string>();
        if (j.contains("global_seed")) cfg.global_seed = j.at("global_seed").get<std::uint64_t>();
        if (j.contains("workers")) {
            const auto w = j.at("workers").get<std::int64_t>();
            if (w < 1) throw UsageError("workers must be >= 1");
            cfg.workers = static_cast<unsigned>(w);
        }
        if (j.contains("image_format")) cfg.image_format = parse_image_format(j.at("image_format").get<std::string>());
        if (j.contains("jpeg_quality")) cfg.jpeg_quality = j.at("jpeg_quality").get<int>();
        if (j.contains("swap_lateral")) cfg.swap_lateral = j.at("swap_lateral").get<bool>();
        if (j.contains("radar_dropout_all_sensors"))
            cfg.radar_dropout_all_sensors = j.at("radar_dropout_all_sensors").get<bool>();
        if (j.contains("compute_ssim")) cfg.compute_ssim = j.at("compute_ssim").get<bool>();
        if (j.contains("assets")) {
            const auto& a = j.at("assets");
            if (a.contains("dirt")) cfg.assets.dirt = a.at("dirt").get<std::string>();
            if (a.contains("droplets")) cfg.assets.droplets = a.at("droplets").get<std::string>();
            if (a.contains("scratches")) cfg.assets.scratches = a.at("scratches").get<std::string>();
            if (a.contains("soiling")) cfg.assets.soiling = a.at("soiling").get<std::string>();
        }
        if (j.contains("specs")) {
            for (const auto& s : j.at("specs")) cfg.specs.push_back(spec_from_json(s, cfg.global_seed));
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("malformed job config: ") + e.what());
    } catch (const ParameterError& e) {
        throw UsageError(std::string("malformed job config: ") + e.what());
    }
    return cfg;
}

inline JobConfig load_job_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config " + path.string());
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw UsageError("config " + path.string() + " is not valid JSON");
    return job_config_from_json(j);
}

inline std::vector<AlphaMask> load_alpha_dir(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw IoError("asset directory does not exist: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (!e.is_regular_file()) continue;
        const auto ext = e.path().extension().string();
        if (ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".PNG" || ext == ".JPG") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<AlphaMask> masks;
    for (const auto& f : files) masks.push_back(read_alpha_image(read_file(f)));
    if (masks.empty()) throw IoError("asset directory holds no images: " + dir.string());
    return masks;
}

struct LoadedAssets {
    std::vector<AlphaMask> dirt, droplets, scratches, soiling;
};

inline LoadedAssets load_assets(const AssetDirs& dirs) {
    LoadedAssets a;
    if (dirs.dirt) a.dirt = load_alpha_dir(*dirs.dirt);
    if (dirs.droplets) a.droplets = load_alpha_dir(*dirs.droplets);
    if (dirs.scratches) a.scratches = load_alpha_dir(*dirs.scratches);
    if (dirs.soiling) a.soiling = load_alpha_dir(*dirs.soiling);
    return a;
}

}  // namespace occlusion
