#pragma once

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "occlusion/core/rng.hpp"
#include "occlusion/core/spec.hpp"
#include "occlusion/error.hpp"
#include "occlusion/io/dataset.hpp"
#include "occlusion/io/files.hpp"
#include "occlusion/io/lidar_bin.hpp"
#include "occlusion/io/pcd.hpp"
#include "occlusion/pipeline/parallel.hpp"
#include "occlusion/validation/checks.hpp"
#include "occlusion/validation/report.hpp"

namespace occlusion {

enum class ValidateMode { Ssim, Retention, Noise };

inline constexpr std::string_view to_string(ValidateMode m) noexcept {
    switch (m) {
        case ValidateMode::Ssim: return "ssim";
        case ValidateMode::Retention: return "retention";
        case ValidateMode::Noise: return "noise";
    }
    return "?";
}

inline ValidateMode parse_validate_mode(std::string_view s) {
    if (s == "ssim") return ValidateMode::Ssim;
    if (s == "retention") return ValidateMode::Retention;
    if (s == "noise") return ValidateMode::Noise;
    throw UsageError("unknown validation mode '" + std::string(s) + "' (expected ssim, retention or noise)");
}

struct ValidateOptions {
    std::filesystem::path clean_root;
    std::filesystem::path occluded_root;
    ValidateMode mode = ValidateMode::Ssim;
    std::size_t samples_per_camera = kDefaultSamplesPerCamera;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    // Override the parameter parsed from the variant label.
    std::optional<double> drop_percent;
    std::optional<double> noise_sigma;
};

struct ValidateResult {
    bool passed = false;
    nlohmann::json report;
};

struct VariantLabel {
    OcclusionKind kind;
    std::optional<double> value;  // leading numeric parameter, if any
};

// "dirt_0.2" -> {Dirt, 0.2}; "soiling_k51" -> {Soiling, 51}; unknown -> nullopt.
inline std::optional<VariantLabel> parse_variant_label(std::string_view label) {
    std::optional<OcclusionKind> best;
    std::size_t best_len = 0;
    for (const auto k : kAllKinds) {
        const std::string_view name = to_string(k);
        if (label.substr(0, name.size()) == name && (label.size() == name.size() || label[name.size()] == '_') &&
            name.size() > best_len) {
            best = k;
            best_len = name.size();
        }
    }
    if (!best) return std::nullopt;
    VariantLabel out{*best, std::nullopt};
    if (best_len >= label.size()) return out;
    std::string_view rest = label.substr(best_len + 1);
    if (!rest.empty() && rest.front() == 'k') rest.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), v);
    if (ec == std::errc() && (ptr == rest.data() + rest.size() || *ptr == '_')) out.value = v;
    return out;
}

namespace detail {

inline bool looks_like_dataset(const std::filesystem::path& dir) {
    std::error_code ec;
    return std::filesystem::is_directory(dir / "samples", ec) || std::filesystem::is_directory(dir / "sweeps", ec);
}

// The occluded root is either one variant tree or a directory of them.
inline std::vector<std::pair<std::string, std::filesystem::path>> discover_variants(
    const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    std::vector<std::pair<std::string, fs::path>> out;
    if (looks_like_dataset(root)) {
        out.emplace_back(root.filename().string(), root);
        return out;
    }
    std::error_code ec;
    for (const auto& d : fs::directory_iterator(root, ec))
        if (d.is_directory() && looks_like_dataset(d.path())) out.emplace_back(d.path().filename().string(), d.path());
    std::sort(out.begin(), out.end());
    return out;
}

inline PointCloud load_cloud(const std::filesystem::path& path, Modality m) {
    const auto bytes = read_file(path);
    return m == Modality::Lidar ? read_lidar_bin(bytes) : read_pcd(bytes);
}

struct CloudPair {
    DatasetEntry entry;
    std::filesystem::path clean;
    std::filesystem::path degraded;
};

inline std::vector<CloudPair> pair_cloud_files(const std::filesystem::path& clean_root,
                                               const std::filesystem::path& degraded_root, ModalitySet modalities) {
    std::vector<CloudPair> pairs;
    std::vector<std::string> missing;
    for (const auto& e : scan_dataset(degraded_root, modalities)) {
        const auto clean = clean_root / e.relpath;
        if (!std::filesystem::exists(clean)) {
            missing.push_back(e.relpath);
            continue;
        }
        pairs.push_back({e, clean, degraded_root / e.relpath});
    }
    if (!missing.empty()) {
        std::string msg = std::to_string(missing.size()) + " occluded file(s) have no clean counterpart:";
        for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += "\n  " + missing[i];
        throw PairingError(msg);
    }
    return pairs;
}

inline nlohmann::json validate_retention_variant(const ValidateOptions& opt, const std::filesystem::path& tree,
                                                 double percent, bool& passed) {
    const auto pairs = pair_cloud_files(opt.clean_root, tree, {Modality::Lidar, Modality::Radar});
    if (pairs.empty()) throw EmptyInputError("no point-cloud pairs under " + tree.string());
    std::vector<RetentionCheck> checks(pairs.size());
    std::vector<char> skipped(pairs.size(), 0);
    parallel_for(pairs.size(), opt.workers, [&](std::size_t i) {
        const auto a_bytes = read_file(pairs[i].clean);
        const auto b_bytes = read_file(pairs[i].degraded);
        // Radar files of sensors not picked for dropout are verbatim copies.
        if (pairs[i].entry.modality == Modality::Radar && a_bytes == b_bytes && percent > 0.0) {
            skipped[i] = 1;
            return;
        }
        const auto m = pairs[i].entry.modality;
        checks[i] = verify_retention(m == Modality::Lidar ? read_lidar_bin(a_bytes) : read_pcd(a_bytes),
                                     m == Modality::Lidar ? read_lidar_bin(b_bytes) : read_pcd(b_bytes), percent);
    });
    nlohmann::json failures = nlohmann::json::array();
    std::size_t checked = 0, original = 0, retained = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (skipped[i]) continue;
        ++checked;
        original += checks[i].original;
        retained += checks[i].actual;
        if (!checks[i].passed)
            failures.push_back({{"file", pairs[i].entry.relpath},
                                {"expected", checks[i].expected},
                                {"actual", checks[i].actual},
                                {"reason", checks[i].reason}});
    }
    passed = failures.empty() && checked > 0;
    return {{"drop_percent", percent},
            {"files", pairs.size()},
            {"checked", checked},
            {"unmodified", pairs.size() - checked},
            {"retained_fraction", original ? static_cast<double>(retained) / static_cast<double>(original) : 0.0},
            {"failures", failures},
            {"passed", passed}};
}

inline nlohmann::json validate_noise_variant(const ValidateOptions& opt, const std::filesystem::path& tree,
                                             double sigma, bool& passed) {
    const auto pairs = pair_cloud_files(opt.clean_root, tree, {Modality::Lidar, Modality::Radar});
    if (pairs.empty()) throw EmptyInputError("no point-cloud pairs under " + tree.string());
    NoiseAccumulator acc;
    for (const auto& p : pairs) acc.add(load_cloud(p.clean, p.entry.modality), load_cloud(p.degraded, p.entry.modality));
    const NoiseCheck c = evaluate_noise(acc, sigma);
    passed = c.passed;
    nlohmann::json j = {{"sigma", sigma},
                        {"files", pairs.size()},
                        {"points", c.count},
                        {"mean", {c.mean[0], c.mean[1], c.mean[2]}},
                        {"stddev", {c.stddev[0], c.stddev[1], c.stddev[2]}},
                        {"non_spatial_identical", c.non_spatial_identical},
                        {"passed", c.passed}};
    if (!c.reason.empty()) j["reason"] = c.reason;
    return j;
}

}  // namespace detail

// Validates every variant under the occluded root against the clean tree.
// SSIM mode additionally requires the mean drop of dirt and water-blur
// variants to increase strictly with opacity.
inline ValidateResult run_validate(const ValidateOptions& opt) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(opt.clean_root)) throw UsageError("clean root is not a directory: " + opt.clean_root.string());
    if (!fs::is_directory(opt.occluded_root))
        throw UsageError("occluded root is not a directory: " + opt.occluded_root.string());
    const auto variants = detail::discover_variants(opt.occluded_root);
    if (variants.empty()) throw EmptyInputError("no dataset trees under " + opt.occluded_root.string());

    ValidateResult result;
    result.passed = true;
    nlohmann::json out_variants = nlohmann::json::array();
    std::map<OcclusionKind, std::vector<std::pair<double, double>>> drops;  // kind -> (opacity, drop)
    const RngStream rng(opt.seed);

    for (const auto& [label, tree] : variants) {
        const auto parsed = parse_variant_label(label);
        nlohmann::json v;
        v["label"] = label;
        bool ok = true;
        switch (opt.mode) {
            case ValidateMode::Ssim: {
                if (scan_dataset(tree, {Modality::Camera}).empty()) {
                    v["skipped"] = "no camera images";
                    break;
                }
                const DegradationReport r = batch_ssim(opt.clean_root, tree, opt.samples_per_camera, rng, opt.workers);
                v["report"] = to_json(r);
                if (parsed && parsed->value && is_camera_kind(parsed->kind) && parsed->kind != OcclusionKind::Soiling)
                    drops[parsed->kind].emplace_back(*parsed->value, r.mean_drop);
                break;
            }
            case ValidateMode::Retention: {
                std::optional<double> p = opt.drop_percent;
                if (!p && parsed && parsed->kind == OcclusionKind::PointDropout) p = parsed->value;
                if (!p) throw UsageError("cannot determine drop percent for '" + label + "'; pass --percent");
                v["retention"] = detail::validate_retention_variant(opt, tree, *p, ok);
                break;
            }
            case ValidateMode::Noise: {
                std::optional<double> s = opt.noise_sigma;
                if (!s && parsed && parsed->kind == OcclusionKind::GaussianNoise) s = parsed->value;
                if (!s) throw UsageError("cannot determine noise sigma for '" + label + "'; pass --sigma");
                v["noise"] = detail::validate_noise_variant(opt, tree, *s, ok);
                break;
            }
        }
        v["passed"] = ok;
        result.passed = result.passed && ok;
        out_variants.push_back(std::move(v));
    }

    nlohmann::json trends = nlohmann::json::array();
    for (auto& [kind, points] : drops) {
        if (points.size() < 2) continue;
        std::sort(points.begin(), points.end());
        bool increasing = true;
        for (std::size_t i = 1; i < points.size(); ++i)
            if (!(points[i].second > points[i - 1].second)) increasing = false;
        const bool enforced = kind == OcclusionKind::Dirt || kind == OcclusionKind::WaterBlur;
        nlohmann::json series = nlohmann::json::array();
        for (const auto& [a, d] : points) series.push_back({{"opacity", a}, {"mean_drop", d}});
        trends.push_back({{"kind", std::string(to_string(kind))},
                          {"series", series},
                          {"strictly_increasing", increasing},
                          {"enforced", enforced}});
        if (enforced && !increasing) result.passed = false;
    }

    result.report = {{"mode", std::string(to_string(opt.mode))},
                     {"clean_root", opt.clean_root.string()},
                     {"occluded_root", opt.occluded_root.string()},
                     {"seed", opt.seed},
                     {"variants", out_variants},
                     {"passed", result.passed}};
    if (opt.mode == ValidateMode::Ssim) result.report["trends"] = trends;
    return result;
}

}  // namespace occlusion
