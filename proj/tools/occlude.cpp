#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "occlusion/occlusion.hpp"

namespace {

using namespace occlusion;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct OccludeArgs {
    std::string config;
    std::string dataset_root;
    std::string output_root;
    std::optional<std::uint64_t> seed;
    std::string type;
    std::string severity;
    std::vector<double> opacity;
    std::vector<double> percent;
    std::vector<double> sigma;
    std::vector<std::string> region;
    std::vector<double> angle;
    std::vector<int> kernel_size;
    std::string sensor;
    std::optional<unsigned> workers;
    std::string format;
    std::optional<int> jpeg_quality;
    bool swap_lateral = false;
    bool all_radar_sensors = false;
    bool ssim = false;
    std::string dirt_dir, droplet_dir, scratch_dir, soiling_dir;
};

struct ValidateArgs {
    std::string clean_root;
    std::string occluded_root;
    std::string mode = "ssim";
    std::size_t samples = kDefaultSamplesPerCamera;
    std::uint64_t seed = 0;
    std::optional<unsigned> workers;
    std::optional<double> percent;
    std::optional<double> sigma;
    std::string report;
};

// Builds the sweep described by --type and the parameter flags. Each
// parameter flag accepts several values; the sweep is their cross product.
std::vector<OcclusionSpec> specs_from_flags(const OccludeArgs& a, std::uint64_t seed) {
    if (a.type.empty()) return {};
    const OcclusionKind kind = parse_kind(a.type);
    if (!a.severity.empty()) return {severity_to_spec(kind, parse_severity(a.severity), seed)};

    std::vector<OcclusionSpec> out{OcclusionSpec{.kind = kind, .seed = seed}};
    auto expand = [&out](const auto& values, auto assign) {
        if (values.empty()) return;
        std::vector<OcclusionSpec> next;
        for (const auto& base : out)
            for (const auto& v : values) {
                OcclusionSpec s = base;
                assign(s, v);
                next.push_back(s);
            }
        out = std::move(next);
    };
    expand(a.opacity, [](OcclusionSpec& s, double v) { s.opacity = v; });
    expand(a.percent, [](OcclusionSpec& s, double v) { s.drop_percent = v; });
    expand(a.sigma, [](OcclusionSpec& s, double v) { s.noise_sigma = v; });
    expand(a.region, [](OcclusionSpec& s, const std::string& v) { s.region = parse_region(v); });
    expand(a.angle, [](OcclusionSpec& s, double v) { s.cone_angle_deg = v; });
    expand(a.kernel_size, [](OcclusionSpec& s, int v) { s.soiling_kernel_size = v; });
    if (!a.sensor.empty() && a.sensor != "random")
        for (auto& s : out) s.sensor = parse_radar_sensor(a.sensor);
    return out;
}

JobConfig build_job(const OccludeArgs& a) {
    JobConfig cfg = a.config.empty() ? JobConfig{} : load_job_config(a.config);
    if (!a.dataset_root.empty()) cfg.dataset_root = a.dataset_root;
    if (!a.output_root.empty()) cfg.output_root = a.output_root;
    if (a.seed) {
        cfg.global_seed = *a.seed;
        for (auto& s : cfg.specs) s.seed = *a.seed;
    }
    if (a.workers) cfg.workers = *a.workers;
    if (!a.format.empty()) cfg.image_format = parse_image_format(a.format);
    if (a.jpeg_quality) cfg.jpeg_quality = *a.jpeg_quality;
    if (a.swap_lateral) cfg.swap_lateral = true;
    if (a.all_radar_sensors) cfg.radar_dropout_all_sensors = true;
    if (a.ssim) cfg.compute_ssim = true;
    if (!a.dirt_dir.empty()) cfg.assets.dirt = a.dirt_dir;
    if (!a.droplet_dir.empty()) cfg.assets.droplets = a.droplet_dir;
    if (!a.scratch_dir.empty()) cfg.assets.scratches = a.scratch_dir;
    if (!a.soiling_dir.empty()) cfg.assets.soiling = a.soiling_dir;
    try {
        for (auto& s : specs_from_flags(a, cfg.global_seed)) cfg.specs.push_back(s);
    } catch (const ParameterError& e) {
        throw UsageError(e.what());
    }
    validate_config(cfg);
    return cfg;
}

int cmd_occlude(const OccludeArgs& a) {
    const JobConfig cfg = build_job(a);
    const OccludeResult r = run_occlude(cfg, &std::cerr);
    std::cout << "wrote " << r.records.size() << " file(s) across " << cfg.specs.size() << " spec(s)";
    if (r.reused) std::cout << ", " << r.reused << " reused";
    std::cout << "; manifest " << (cfg.output_root / kManifestName).string() << "\n";
    if (!r.ok()) {
        std::cerr << r.errors.size() << " file(s) failed\n";
        return kExitFailure;
    }
    return EXIT_SUCCESS;
}

int cmd_validate(const ValidateArgs& a) {
    ValidateOptions opt;
    opt.clean_root = a.clean_root;
    opt.occluded_root = a.occluded_root;
    opt.mode = parse_validate_mode(a.mode);
    opt.samples_per_camera = a.samples;
    opt.seed = a.seed;
    opt.workers = a.workers.value_or(default_worker_count());
    opt.drop_percent = a.percent;
    opt.noise_sigma = a.sigma;
    const ValidateResult r = run_validate(opt);
    const std::string text = r.report.dump(2) + "\n";
    if (!a.report.empty()) write_file_atomic(a.report, to_bytes(text));
    std::cout << text;
    return r.passed ? EXIT_SUCCESS : kExitFailure;
}

int cmd_scan(const std::string& root, bool json) {
    const ScanResult scan = scan_dataset_detailed(root);
    for (const auto& w : scan.warnings) std::cerr << "warning: " << w << "\n";
    std::map<std::string, std::pair<std::size_t, std::uintmax_t>> per_channel;
    for (const auto& e : scan.entries) {
        auto& c = per_channel[e.channel];
        c.first += 1;
        c.second += e.byte_length;
    }
    if (json) {
        nlohmann::json j;
        j["root"] = root;
        j["files"] = scan.entries.size();
        for (const auto& [ch, c] : per_channel) j["channels"][ch] = {{"files", c.first}, {"bytes", c.second}};
        j["warnings"] = scan.warnings;
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& [ch, c] : per_channel) std::cout << ch << "\t" << c.first << " files\t" << c.second << " bytes\n";
        std::cout << scan.entries.size() << " files\n";
    }
    return EXIT_SUCCESS;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sensor occlusion generator for nuScenes-format datasets"};
    app.require_subcommand(1);

    OccludeArgs oa;
    auto* occ = app.add_subcommand("occlude", "Apply occlusions and write a mirrored output tree");
    occ->add_option("--config", oa.config, "JSON job config")->check(CLI::ExistingFile);
    occ->add_option("--dataset-root", oa.dataset_root, "Clean dataset root");
    occ->add_option("--output-root", oa.output_root, "Output root");
    occ->add_option("--seed", oa.seed, "Global seed");
    occ->add_option("--type", oa.type, "Occlusion kind");
    occ->add_option("--severity", oa.severity, "light, moderate or heavy (camera kinds)");
    occ->add_option("--opacity", oa.opacity, "Opacity / severity in [0, 1]; several values sweep");
    occ->add_option("--percent", oa.percent, "Drop percent in [0, 99]");
    occ->add_option("--sigma", oa.sigma, "Noise std dev in metres");
    occ->add_option("--region", oa.region, "front, back, left or right");
    occ->add_option("--angle", oa.angle, "Cone angle in degrees");
    occ->add_option("--kernel-size", oa.kernel_size, "Soiling kernel size");
    occ->add_option("--sensor", oa.sensor, "Radar to drop, or 'random'");
    occ->add_option("--workers", oa.workers, "Worker threads")->check(CLI::PositiveNumber);
    occ->add_option("--format", oa.format, "Image output format")->check(CLI::IsMember({"jpeg", "png"}));
    occ->add_option("--jpeg-quality", oa.jpeg_quality, "JPEG quality")->check(CLI::Range(1, 100));
    occ->add_flag("--swap-lateral", oa.swap_lateral, "Use left = +y, right = -y");
    occ->add_flag("--all-radar-sensors", oa.all_radar_sensors, "Radar dropout on every sensor instead of one per frame");
    occ->add_flag("--ssim", oa.ssim, "Record SSIM of each camera output in the manifest");
    occ->add_option("--dirt-dir", oa.dirt_dir, "Directory of dirt patch masks");
    occ->add_option("--droplet-dir", oa.droplet_dir, "Directory of droplet masks");
    occ->add_option("--scratch-dir", oa.scratch_dir, "Directory of scratch textures");
    occ->add_option("--soiling-dir", oa.soiling_dir, "Directory of soiling masks");

    ValidateArgs va;
    auto* val = app.add_subcommand("validate", "Compare an occluded tree against the clean dataset");
    val->add_option("--dataset-root,--clean-root", va.clean_root, "Clean dataset root")->required();
    val->add_option("--output-root,--occluded-root", va.occluded_root, "Occluded tree or directory of trees")->required();
    val->add_option("--mode", va.mode, "ssim, retention or noise")->check(CLI::IsMember({"ssim", "retention", "noise"}));
    val->add_option("--samples", va.samples, "Samples per camera (ssim)")->check(CLI::PositiveNumber);
    val->add_option("--seed", va.seed, "Sampling seed");
    val->add_option("--workers", va.workers, "Worker threads")->check(CLI::PositiveNumber);
    val->add_option("--percent", va.percent, "Drop percent (retention)");
    val->add_option("--sigma", va.sigma, "Noise std dev (noise)");
    val->add_option("--report", va.report, "Also write the report to this file");

    bool presets_json = false;
    auto* pre = app.add_subcommand("presets", "List occlusion kinds, parameters and settings");
    pre->add_flag("--json", presets_json, "Emit JSON");

    std::string scan_root;
    bool scan_json = false;
    auto* scan = app.add_subcommand("scan", "Summarize the sensor files of a dataset");
    scan->add_option("--dataset-root", scan_root, "Dataset root")->required();
    scan->add_flag("--json", scan_json, "Emit JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? EXIT_SUCCESS : kExitUsage;
    }

    try {
        if (*occ) return cmd_occlude(oa);
        if (*val) return cmd_validate(va);
        if (*pre) {
            std::cout << (presets_json ? presets_json_text() : presets_text());
            return EXIT_SUCCESS;
        }
        if (*scan) return cmd_scan(scan_root, scan_json);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const PairingError& e) {
        std::cerr << "pairing error: " << e.what() << "\n";
        return kExitFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitFailure;
    }
    return EXIT_SUCCESS;
}
