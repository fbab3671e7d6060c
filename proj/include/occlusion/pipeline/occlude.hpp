#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <system_error>
#include <variant>
#include <vector>

#include "occlusion/camera/dirt.hpp"
#include "occlusion/camera/scratch.hpp"
#include "occlusion/camera/soiling.hpp"
#include "occlusion/camera/water_blur.hpp"
#include "occlusion/core/hash.hpp"
#include "occlusion/core/manifest.hpp"
#include "occlusion/core/rng.hpp"
#include "occlusion/core/spec.hpp"
#include "occlusion/io/dataset.hpp"
#include "occlusion/io/files.hpp"
#include "occlusion/io/image_codec.hpp"
#include "occlusion/io/lidar_bin.hpp"
#include "occlusion/io/pcd.hpp"
#include "occlusion/pipeline/job.hpp"
#include "occlusion/pipeline/parallel.hpp"
#include "occlusion/pointcloud/occlusion.hpp"
#include "occlusion/validation/ssim.hpp"

namespace occlusion {

inline constexpr const char* kManifestName = "manifest.jsonl";

struct OccludeResult {
    std::vector<ManifestRecord> records;
    std::vector<std::string> errors;
    std::size_t reused = 0;

    bool ok() const noexcept { return errors.empty(); }
};

// Which files a spec touches.
inline bool spec_targets(const OcclusionSpec& spec, Modality m) {
    switch (spec.kind) {
        case OcclusionKind::Dirt:
        case OcclusionKind::WaterBlur:
        case OcclusionKind::Scratch:
        case OcclusionKind::Soiling: return m == Modality::Camera;
        case OcclusionKind::RadarSensorDrop:
        case OcclusionKind::GaussianNoise: return m == Modality::Radar;
        case OcclusionKind::PointDropout: return m == Modality::Radar || m == Modality::Lidar;
        case OcclusionKind::RegionDrop:
        case OcclusionKind::AngleDrop: return m == Modality::Lidar;
    }
    return false;
}

// Output relpath inside the spec subtree; PNG output swaps the extension.
inline std::string camera_output_relpath(const std::string& relpath, ImageFormat format) {
    if (format == ImageFormat::Jpeg) return relpath;
    std::filesystem::path p(relpath);
    p.replace_extension(".png");
    return p.generic_string();
}

namespace detail {

struct FileTask {
    DatasetEntry entry;
    bool passthrough = false;
};

struct FrameTask {
    RadarFrame frame;
};

using Task = std::variant<FileTask, FrameTask>;

struct TaskOutcome {
    std::vector<ManifestRecord> records;
    std::optional<std::string> error;
    std::size_t reused = 0;
};

class OccludeRunner {
public:
    OccludeRunner(const JobConfig& cfg, const LoadedAssets& assets,
                  const std::map<std::string, ManifestRecord>& previous)
        : cfg_(cfg), assets_(assets), previous_(previous) {}

    TaskOutcome run(const OcclusionSpec& spec, const Task& task) const {
        TaskOutcome out;
        try {
            if (const auto* f = std::get_if<FileTask>(&task))
                run_file(spec, f->entry, f->passthrough, out);
            else
                run_frame(spec, std::get<FrameTask>(task).frame, out);
        } catch (const std::exception& e) {
            out.error = e.what();
        }
        return out;
    }

private:
    std::uint64_t file_seed(const OcclusionSpec& spec, const std::string& key) const {
        return derive_seed(spec.seed, key + "#" + spec_id(spec));
    }

    // Reuses an existing output when the manifest from a previous run
    // describes the same inputs and the file on disk still matches.
    bool try_reuse(const ManifestRecord& candidate, TaskOutcome& out) const {
        const auto it = previous_.find(candidate.output_relpath);
        if (it == previous_.end()) return false;
        const ManifestRecord& prev = it->second;
        if (prev.source_relpath != candidate.source_relpath || !(prev.spec == candidate.spec) ||
            prev.derived_seed != candidate.derived_seed || prev.input_checksum != candidate.input_checksum)
            return false;
        if (cfg_.compute_ssim != prev.ssim.has_value()) return false;
        const auto path = cfg_.output_root / candidate.output_relpath;
        std::error_code ec;
        if (!std::filesystem::is_regular_file(path, ec)) return false;
        if (content_checksum(read_file(path)) != prev.output_checksum) return false;
        out.records.push_back(prev);
        ++out.reused;
        return true;
    }

    void emit(const OcclusionSpec& spec, const std::string& source_rel, const std::string& out_rel,
              std::uint64_t seed, std::uint64_t in_checksum, const std::vector<std::byte>& bytes,
              std::optional<double> ssim_value, TaskOutcome& out) const {
        const std::string subtree_rel = spec_id(spec) + "/" + out_rel;
        const auto path = mirror_output_path(subtree_rel, cfg_.output_root);
        write_file_atomic(path, bytes);
        out.records.push_back({source_rel, subtree_rel, spec, seed, in_checksum, content_checksum(bytes), ssim_value});
    }

    ManifestRecord probe(const OcclusionSpec& spec, const std::string& source_rel, const std::string& out_rel,
                         std::uint64_t seed, std::uint64_t in_checksum) const {
        return {source_rel, spec_id(spec) + "/" + out_rel, spec, seed, in_checksum, 0, std::nullopt};
    }

    ImageBuffer occlude_image(const OcclusionSpec& spec, const ImageBuffer& img, RngStream& rng) const {
        switch (spec.kind) {
            case OcclusionKind::Dirt: {
                DirtOptions opts;
                opts.density = dirt_density_for_opacity(*spec.opacity);
                if (!assets_.dirt.empty()) opts.patches = &assets_.dirt;
                return apply_dirt(img, *spec.opacity, rng, opts);
            }
            case OcclusionKind::WaterBlur: {
                WaterBlurOptions opts;
                if (!assets_.droplets.empty()) opts.droplets = &assets_.droplets;
                return apply_water_blur(img, *spec.opacity, rng, opts);
            }
            case OcclusionKind::Scratch: {
                ScratchOptions opts;
                if (!assets_.scratches.empty()) opts.textures = &assets_.scratches;
                return apply_scratch(img, *spec.opacity, rng, opts);
            }
            case OcclusionKind::Soiling: {
                SoilingOptions opts;
                if (!assets_.soiling.empty()) opts.masks = &assets_.soiling;
                return apply_soiling(img, *spec.soiling_kernel_size, rng, opts);
            }
            default: throw ParameterError("not a camera occlusion: " + std::string(to_string(spec.kind)));
        }
    }

    PointCloud occlude_cloud(const OcclusionSpec& spec, const PointCloud& cloud, RngStream& rng) const {
        switch (spec.kind) {
            case OcclusionKind::PointDropout: return dropout_points(cloud, *spec.drop_percent, rng);
            case OcclusionKind::GaussianNoise: return add_gaussian_noise(cloud, *spec.noise_sigma, rng);
            case OcclusionKind::RegionDrop: return occlude_region(cloud, RegionSelector{*spec.region, cfg_.swap_lateral});
            case OcclusionKind::AngleDrop:
                return occlude_angle(cloud, ConeSelector{*spec.region, *spec.cone_angle_deg, cfg_.swap_lateral});
            default: throw ParameterError("not a per-file point-cloud occlusion: " + std::string(to_string(spec.kind)));
        }
    }

    void run_file(const OcclusionSpec& spec, const DatasetEntry& entry, bool passthrough, TaskOutcome& out) const {
        const auto input = read_file(cfg_.dataset_root / entry.relpath);
        const std::uint64_t in_sum = content_checksum(input);
        const std::uint64_t seed = file_seed(spec, entry.relpath);
        const std::string out_rel = entry.modality == Modality::Camera
                                        ? camera_output_relpath(entry.relpath, cfg_.image_format)
                                        : entry.relpath;
        if (try_reuse(probe(spec, entry.relpath, out_rel, seed, in_sum), out)) return;
        RngStream rng(seed);

        if (passthrough) {
            emit(spec, entry.relpath, out_rel, seed, in_sum, input, std::nullopt, out);
        } else if (entry.modality == Modality::Camera) {
            const ImageBuffer img = read_image(input);
            const ImageBuffer occluded = occlude_image(spec, img, rng);
            const auto bytes = write_image(occluded, cfg_.image_format, cfg_.jpeg_quality);
            std::optional<double> score;
            if (cfg_.compute_ssim) score = ssim(img, read_image(bytes));
            emit(spec, entry.relpath, out_rel, seed, in_sum, bytes, score, out);
        } else if (entry.modality == Modality::Lidar) {
            const PointCloud cloud = read_lidar_bin(input);
            emit(spec, entry.relpath, out_rel, seed, in_sum, write_lidar_bin(occlude_cloud(spec, cloud, rng)),
                 std::nullopt, out);
        } else {
            const PcdDocument doc = read_pcd_document(input);
            const PointCloud result = occlude_cloud(spec, doc.cloud, rng);
            emit(spec, entry.relpath, out_rel, seed, in_sum, write_pcd(result, PcdWriteOptions::from(doc.header)),
                 std::nullopt, out);
        }
    }

    // Sensor drop and single-sensor radar dropout decide per frame which
    // sensor is affected. The dropped sensor's files are written as empty
    // clouds with the original schema; untouched files are copied verbatim.
    void run_frame(const OcclusionSpec& spec, const RadarFrame& frame, TaskOutcome& out) const {
        const std::uint64_t frame_seed = file_seed(spec, frame.key);
        RngStream frame_rng(frame_seed);
        const std::optional<RadarSensor> choice =
            spec.kind == OcclusionKind::RadarSensorDrop ? spec.sensor : std::nullopt;
        const RadarSensor target = pick_dropped_sensor(choice, frame_rng);

        for (const auto& [sensor, entries] : frame.files) {
            for (const auto& entry : entries) {
                const auto input = read_file(cfg_.dataset_root / entry.relpath);
                const std::uint64_t in_sum = content_checksum(input);
                const bool affected = sensor == target;
                const std::uint64_t seed =
                    affected && spec.kind == OcclusionKind::PointDropout ? file_seed(spec, entry.relpath) : frame_seed;
                if (try_reuse(probe(spec, entry.relpath, entry.relpath, seed, in_sum), out)) continue;
                if (!affected) {
                    emit(spec, entry.relpath, entry.relpath, seed, in_sum, input, std::nullopt, out);
                    continue;
                }
                const PcdDocument doc = read_pcd_document(input);
                PointCloud result;
                if (spec.kind == OcclusionKind::RadarSensorDrop) {
                    result = doc.cloud.empty_like();
                } else {
                    RngStream rng(seed);
                    result = dropout_points(doc.cloud, *spec.drop_percent, rng);
                }
                emit(spec, entry.relpath, entry.relpath, seed, in_sum,
                     write_pcd(result, PcdWriteOptions::from(doc.header)), std::nullopt, out);
            }
        }
    }

    const JobConfig& cfg_;
    const LoadedAssets& assets_;
    const std::map<std::string, ManifestRecord>& previous_;
};

inline std::vector<Task> plan_tasks(const OcclusionSpec& spec, const JobConfig& cfg,
                                    const std::vector<DatasetEntry>& entries, const RadarGrouping& radar,
                                    std::ostream* log) {
    std::vector<Task> tasks;
    const bool frame_based = spec.kind == OcclusionKind::RadarSensorDrop ||
                             (spec.kind == OcclusionKind::PointDropout && !cfg.radar_dropout_all_sensors);
    for (const auto& e : entries) {
        if (!spec_targets(spec, e.modality)) continue;
        if (e.modality == Modality::Radar && frame_based) continue;
        tasks.push_back(FileTask{e});
    }
    if (frame_based) {
        for (const auto& frame : radar.frames) tasks.push_back(FrameTask{frame});
        // Files that cannot be assigned to a frame pass through unchanged.
        for (const auto& orphan : radar.orphans) {
            if (log) *log << "warning: " << orphan.relpath << " not assigned to a radar frame; copied unchanged\n";
            tasks.push_back(FileTask{orphan, true});
        }
    }
    return tasks;
}

}  // namespace detail

// Applies every spec of the job to the matching files of the dataset and
// writes <output_root>/<spec_id>/<relpath> plus <output_root>/manifest.jsonl.
// Each output depends only on (file bytes, spec, derived seed), so outputs
// and manifest are identical across runs and worker counts.
inline OccludeResult run_occlude(const JobConfig& cfg, std::ostream* log = nullptr) {
    namespace fs = std::filesystem;
    validate_config(cfg);
    const ScanResult scan = scan_dataset_detailed(cfg.dataset_root);
    if (log)
        for (const auto& w : scan.warnings) *log << "warning: " << w << "\n";
    const LoadedAssets assets = load_assets(cfg.assets);
    const RadarGrouping radar = group_radar_frames(scan.entries);

    std::error_code ec;
    fs::create_directories(cfg.output_root, ec);
    if (ec) throw IoError("cannot create output root " + cfg.output_root.string() + ": " + ec.message());

    const fs::path manifest_path = cfg.output_root / kManifestName;
    std::vector<ManifestRecord> earlier;
    if (fs::exists(manifest_path)) {
        try {
            earlier = read_manifest(manifest_path);
        } catch (const Error& e) {
            if (log) *log << "warning: ignoring unreadable manifest: " << e.what() << "\n";
            earlier.clear();
        }
    }
    std::map<std::string, ManifestRecord> previous;
    for (const auto& r : earlier) previous[r.output_relpath] = r;

    fs::path partial = manifest_path;
    partial += ".partial";
    OccludeResult result;
    {
        const detail::OccludeRunner runner(cfg, assets, previous);
        for (const auto& spec : cfg.specs) {
            const auto tasks = detail::plan_tasks(spec, cfg, scan.entries, radar, log);
            std::vector<detail::TaskOutcome> outcomes(tasks.size());
            parallel_for(tasks.size(), cfg.workers,
                         [&](std::size_t i) { outcomes[i] = runner.run(spec, tasks[i]); });
            for (std::size_t i = 0; i < tasks.size(); ++i) {
                auto& o = outcomes[i];
                for (auto& r : o.records) result.records.push_back(std::move(r));
                result.reused += o.reused;
                if (o.error) {
                    const std::string where = std::holds_alternative<detail::FileTask>(tasks[i])
                                                  ? std::get<detail::FileTask>(tasks[i]).entry.relpath
                                                  : std::get<detail::FrameTask>(tasks[i]).frame.key;
                    const std::string msg = spec_id(spec) + ": " + where + ": " + *o.error;
                    if (log) *log << "error: " << msg << "\n";
                    result.errors.push_back(msg);
                }
            }
        }
    }
    // Records of outputs this run did not touch are carried over first.
    {
        std::set<std::string> produced;
        for (const auto& r : result.records) produced.insert(r.output_relpath);
        ManifestWriter writer(partial, true);
        for (const auto& r : earlier)
            if (!produced.contains(r.output_relpath)) writer.append(r);
        for (const auto& r : result.records) writer.append(r);
    }
    fs::rename(partial, manifest_path, ec);
    if (ec) throw IoError("cannot finalize manifest: " + ec.message());
    return result;
}

}  // namespace occlusion
