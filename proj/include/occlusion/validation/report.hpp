#pragma once

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "occlusion/core/rng.hpp"
#include "occlusion/error.hpp"
#include "occlusion/io/dataset.hpp"
#include "occlusion/io/files.hpp"
#include "occlusion/io/image_codec.hpp"
#include "occlusion/pipeline/parallel.hpp"
#include "occlusion/validation/ssim.hpp"

namespace occlusion {

inline constexpr std::size_t kDefaultSamplesPerCamera = 5000;

struct ChannelStats {
    std::size_t available = 0;
    std::size_t used = 0;
    std::size_t shortfall = 0;  // requested - used when the channel holds fewer files
    double mean_ssim = 0.0;
};

struct DegradationReport {
    std::string label;
    std::size_t requested_per_camera = 0;
    std::size_t samples = 0;
    double mean_ssim = 1.0;
    double mean_drop = 0.0;  // 1 - mean SSIM
    std::map<std::string, ChannelStats> per_camera;
};

inline nlohmann::json to_json(const DegradationReport& r) {
    nlohmann::json j;
    j["label"] = r.label;
    j["requested_per_camera"] = r.requested_per_camera;
    j["samples"] = r.samples;
    j["mean_ssim"] = r.mean_ssim;
    j["mean_drop"] = r.mean_drop;
    nlohmann::json cams = nlohmann::json::object();
    for (const auto& [name, s] : r.per_camera)
        cams[name] = {{"available", s.available}, {"used", s.used}, {"shortfall", s.shortfall}, {"mean_ssim", s.mean_ssim}};
    j["per_camera"] = cams;
    return j;
}

struct ImagePair {
    std::string channel;
    std::filesystem::path clean;
    std::filesystem::path degraded;
};

// Camera files of `degraded_root` paired with the clean file of the same
// relpath. An occluded image re-encoded as PNG pairs with the clean file of
// the same stem.
inline std::vector<ImagePair> pair_camera_files(const std::filesystem::path& clean_root,
                                                const std::filesystem::path& degraded_root) {
    namespace fs = std::filesystem;
    const auto degraded = scan_dataset(degraded_root, {Modality::Camera});
    std::vector<ImagePair> pairs;
    std::vector<std::string> missing;
    for (const auto& e : degraded) {
        fs::path clean = clean_root / e.relpath;
        if (!fs::exists(clean)) {
            bool found = false;
            for (const char* ext : {".jpg", ".jpeg", ".png"}) {
                fs::path alt = clean;
                alt.replace_extension(ext);
                if (fs::exists(alt)) {
                    clean = alt;
                    found = true;
                    break;
                }
            }
            if (!found) {
                missing.push_back(e.relpath);
                continue;
            }
        }
        pairs.push_back({e.channel, clean, degraded_root / e.relpath});
    }
    if (!missing.empty()) {
        std::string msg = std::to_string(missing.size()) + " occluded file(s) have no clean counterpart:";
        for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += "\n  " + missing[i];
        throw PairingError(msg);
    }
    return pairs;
}

// Samples up to `samples_per_camera` pairs per channel without replacement
// and averages SSIM. Channel draws come from rng.child(channel), so the
// selection of one channel does not depend on the others.
inline DegradationReport batch_ssim(const std::filesystem::path& clean_root,
                                    const std::filesystem::path& degraded_root, std::size_t samples_per_camera,
                                    const RngStream& rng, unsigned workers = 1, const SsimParams& params = {}) {
    if (samples_per_camera == 0) throw ParameterError("samples per camera must be positive");
    const auto pairs = pair_camera_files(clean_root, degraded_root);
    if (pairs.empty()) throw EmptyInputError("no camera image pairs under " + degraded_root.string());

    std::map<std::string, std::vector<std::size_t>> by_channel;
    for (std::size_t i = 0; i < pairs.size(); ++i) by_channel[pairs[i].channel].push_back(i);

    DegradationReport report;
    report.label = degraded_root.filename().string();
    report.requested_per_camera = samples_per_camera;
    std::vector<std::size_t> chosen;
    for (auto& [channel, idx] : by_channel) {
        RngStream channel_rng = rng.child(channel);
        // partial Fisher-Yates
        const std::size_t take = std::min(samples_per_camera, idx.size());
        for (std::size_t i = 0; i < take; ++i) {
            const std::size_t j = i + channel_rng.uniform_index(idx.size() - i);
            std::swap(idx[i], idx[j]);
        }
        idx.resize(take);
        std::sort(idx.begin(), idx.end());
        ChannelStats& stats = report.per_camera[channel];
        stats.used = take;
        chosen.insert(chosen.end(), idx.begin(), idx.end());
    }
    for (auto& [channel, stats] : report.per_camera) {
        stats.available = static_cast<std::size_t>(
            std::count_if(pairs.begin(), pairs.end(), [&](const ImagePair& p) { return p.channel == channel; }));
        stats.shortfall = samples_per_camera > stats.used ? samples_per_camera - stats.used : 0;
    }

    std::vector<double> scores(chosen.size());
    parallel_for(chosen.size(), workers, [&](std::size_t k) {
        const auto& p = pairs[chosen[k]];
        const ImageBuffer a = read_image(read_file(p.clean));
        const ImageBuffer b = read_image(read_file(p.degraded));
        if (!a.same_shape(b)) throw ShapeError("dimension mismatch for " + p.degraded.string());
        scores[k] = ssim(a, b, params);
    });

    double total = 0.0;
    std::map<std::string, std::pair<double, std::size_t>> channel_sum;
    for (std::size_t k = 0; k < chosen.size(); ++k) {
        total += scores[k];
        auto& cs = channel_sum[pairs[chosen[k]].channel];
        cs.first += scores[k];
        cs.second += 1;
    }
    for (auto& [channel, stats] : report.per_camera) {
        const auto& cs = channel_sum[channel];
        stats.mean_ssim = cs.second ? cs.first / static_cast<double>(cs.second) : 0.0;
    }
    report.samples = chosen.size();
    report.mean_ssim = total / static_cast<double>(chosen.size());
    report.mean_drop = 1.0 - report.mean_ssim;
    return report;
}

}  // namespace occlusion
