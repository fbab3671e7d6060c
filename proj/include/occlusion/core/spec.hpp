#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "occlusion/error.hpp"

namespace occlusion {

enum class OcclusionKind {
    Dirt,
    WaterBlur,
    Scratch,
    Soiling,
    RadarSensorDrop,
    PointDropout,
    GaussianNoise,
    RegionDrop,
    AngleDrop,
};

inline constexpr std::array kAllKinds = {
    OcclusionKind::Dirt,          OcclusionKind::WaterBlur,    OcclusionKind::Scratch,
    OcclusionKind::Soiling,       OcclusionKind::RadarSensorDrop, OcclusionKind::PointDropout,
    OcclusionKind::GaussianNoise, OcclusionKind::RegionDrop,   OcclusionKind::AngleDrop,
};

enum class Region { Front, Back, Left, Right };

enum class RadarSensor { Front, FrontLeft, FrontRight, BackLeft, BackRight };

inline constexpr std::array kAllRadarSensors = {
    RadarSensor::Front, RadarSensor::FrontLeft, RadarSensor::FrontRight,
    RadarSensor::BackLeft, RadarSensor::BackRight,
};

enum class SeverityPreset { Light, Moderate, Heavy };

constexpr std::string_view to_string(OcclusionKind kind) noexcept {
    switch (kind) {
        case OcclusionKind::Dirt: return "dirt";
        case OcclusionKind::WaterBlur: return "water_blur";
        case OcclusionKind::Scratch: return "scratch";
        case OcclusionKind::Soiling: return "soiling";
        case OcclusionKind::RadarSensorDrop: return "radar_sensor_drop";
        case OcclusionKind::PointDropout: return "point_dropout";
        case OcclusionKind::GaussianNoise: return "gaussian_noise";
        case OcclusionKind::RegionDrop: return "region_drop";
        case OcclusionKind::AngleDrop: return "angle_drop";
    }
    return "unknown";
}

constexpr std::string_view to_string(Region region) noexcept {
    switch (region) {
        case Region::Front: return "front";
        case Region::Back: return "back";
        case Region::Left: return "left";
        case Region::Right: return "right";
    }
    return "unknown";
}

// Sensor names as they appear in nuScenes channel names after "RADAR_".
constexpr std::string_view to_string(RadarSensor sensor) noexcept {
    switch (sensor) {
        case RadarSensor::Front: return "FRONT";
        case RadarSensor::FrontLeft: return "FRONT_LEFT";
        case RadarSensor::FrontRight: return "FRONT_RIGHT";
        case RadarSensor::BackLeft: return "BACK_LEFT";
        case RadarSensor::BackRight: return "BACK_RIGHT";
    }
    return "unknown";
}

constexpr std::string_view to_string(SeverityPreset preset) noexcept {
    switch (preset) {
        case SeverityPreset::Light: return "light";
        case SeverityPreset::Moderate: return "moderate";
        case SeverityPreset::Heavy: return "heavy";
    }
    return "unknown";
}

namespace detail {

inline std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (c == '-') c = '_';
    }
    return out;
}

// Shortest representation that round-trips.
inline std::string format_number(double value) {
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), end);
}

}  // namespace detail

inline OcclusionKind parse_kind(std::string_view text) {
    const std::string key = detail::lower(text);
    for (OcclusionKind kind : kAllKinds) {
        if (key == to_string(kind)) return kind;
    }
    if (key == "waterblur" || key == "water" || key == "rain") return OcclusionKind::WaterBlur;
    if (key == "sensor_drop") return OcclusionKind::RadarSensorDrop;
    if (key == "dropout") return OcclusionKind::PointDropout;
    if (key == "noise") return OcclusionKind::GaussianNoise;
    if (key == "region") return OcclusionKind::RegionDrop;
    if (key == "angle") return OcclusionKind::AngleDrop;
    throw ParameterError("unknown occlusion kind '" + std::string(text) + "'");
}

inline Region parse_region(std::string_view text) {
    const std::string key = detail::lower(text);
    for (Region r : {Region::Front, Region::Back, Region::Left, Region::Right}) {
        if (key == to_string(r)) return r;
    }
    throw ParameterError("unknown region '" + std::string(text) + "'");
}

// Accepts "FRONT_LEFT", "front_left" or the full channel "RADAR_FRONT_LEFT".
inline RadarSensor parse_radar_sensor(std::string_view text) {
    std::string key = detail::lower(text);
    if (key.starts_with("radar_")) key.erase(0, 6);
    for (RadarSensor s : kAllRadarSensors) {
        if (key == detail::lower(to_string(s))) return s;
    }
    throw ParameterError("unknown radar sensor '" + std::string(text) + "'");
}

inline SeverityPreset parse_severity(std::string_view text) {
    const std::string key = detail::lower(text);
    for (SeverityPreset p : {SeverityPreset::Light, SeverityPreset::Moderate, SeverityPreset::Heavy}) {
        if (key == to_string(p)) return p;
    }
    throw ParameterError("unknown severity '" + std::string(text) + "'");
}

constexpr bool is_camera_kind(OcclusionKind kind) noexcept {
    return kind == OcclusionKind::Dirt || kind == OcclusionKind::WaterBlur ||
           kind == OcclusionKind::Scratch || kind == OcclusionKind::Soiling;
}

constexpr double preset_opacity(SeverityPreset preset) noexcept {
    switch (preset) {
        case SeverityPreset::Light: return 0.1;
        case SeverityPreset::Moderate: return 0.2;
        case SeverityPreset::Heavy: return 0.3;
    }
    return 0.0;
}

// One degradation kind with exactly the parameters that kind consumes.
//
//   Dirt, WaterBlur, Scratch   opacity
//   Soiling                    soiling_kernel_size
//   RadarSensorDrop            sensor (optional fixed choice)
//   PointDropout               drop_percent
//   GaussianNoise              noise_sigma
//   RegionDrop                 region
//   AngleDrop                  region, cone_angle_deg
struct OcclusionSpec {
    OcclusionKind kind = OcclusionKind::Dirt;
    std::optional<double> opacity;
    std::optional<double> drop_percent;
    std::optional<double> noise_sigma;
    std::optional<Region> region;
    std::optional<double> cone_angle_deg;
    std::optional<int> soiling_kernel_size;
    std::optional<RadarSensor> sensor;
    std::uint64_t seed = 0;

    bool operator==(const OcclusionSpec&) const = default;

    static OcclusionSpec dirt(double opacity, std::uint64_t seed = 0) {
        return {.kind = OcclusionKind::Dirt, .opacity = opacity, .seed = seed};
    }
    static OcclusionSpec water_blur(double opacity, std::uint64_t seed = 0) {
        return {.kind = OcclusionKind::WaterBlur, .opacity = opacity, .seed = seed};
    }
    static OcclusionSpec scratch(double opacity, std::uint64_t seed = 0) {
        return {.kind = OcclusionKind::Scratch, .opacity = opacity, .seed = seed};
    }
    static OcclusionSpec soiling(int kernel_size, std::uint64_t seed = 0) {
        return {.kind = OcclusionKind::Soiling, .soiling_kernel_size = kernel_size, .seed = seed};
    }
    static OcclusionSpec radar_sensor_drop(std::optional<RadarSensor> sensor = std::nullopt,
                                           std::uint64_t seed = 0) {
        return {.kind = OcclusionKind::RadarSensorDrop, .sensor = sensor, .seed = seed};
    }
    static OcclusionSpec point_dropout(double percent, std::uint64_t seed = 0) {
        return {.kind = OcclusionKind::PointDropout, .drop_percent = percent, .seed = seed};
    }
    static OcclusionSpec gaussian_noise(double sigma, std::uint64_t seed = 0) {
        return {.kind = OcclusionKind::GaussianNoise, .noise_sigma = sigma, .seed = seed};
    }
    static OcclusionSpec region_drop(Region region, std::uint64_t seed = 0) {
        return {.kind = OcclusionKind::RegionDrop, .region = region, .seed = seed};
    }
    static OcclusionSpec angle_drop(Region region, double angle_deg, std::uint64_t seed = 0) {
        return {.kind = OcclusionKind::AngleDrop, .region = region, .cone_angle_deg = angle_deg,
                .seed = seed};
    }
};

// Throws ParameterError naming the first violated constraint.
inline void validate(const OcclusionSpec& spec) {
    const std::string kind(to_string(spec.kind));
    const bool wants_opacity = spec.kind == OcclusionKind::Dirt ||
                               spec.kind == OcclusionKind::WaterBlur ||
                               spec.kind == OcclusionKind::Scratch;
    const bool wants_percent = spec.kind == OcclusionKind::PointDropout;
    const bool wants_sigma = spec.kind == OcclusionKind::GaussianNoise;
    const bool wants_region =
        spec.kind == OcclusionKind::RegionDrop || spec.kind == OcclusionKind::AngleDrop;
    const bool wants_angle = spec.kind == OcclusionKind::AngleDrop;
    const bool wants_kernel = spec.kind == OcclusionKind::Soiling;
    const bool allows_sensor = spec.kind == OcclusionKind::RadarSensorDrop;

    auto check_presence = [&](bool wanted, bool present, const char* name, bool optional = false) {
        if (wanted && !present && !optional)
            throw ParameterError(kind + " requires parameter '" + name + "'");
        if (!wanted && present)
            throw ParameterError(kind + " does not take parameter '" + name + "'");
    };
    check_presence(wants_opacity, spec.opacity.has_value(), "opacity");
    check_presence(wants_percent, spec.drop_percent.has_value(), "drop_percent");
    check_presence(wants_sigma, spec.noise_sigma.has_value(), "noise_sigma");
    check_presence(wants_region, spec.region.has_value(), "region");
    check_presence(wants_angle, spec.cone_angle_deg.has_value(), "cone_angle_deg");
    check_presence(wants_kernel, spec.soiling_kernel_size.has_value(), "soiling_kernel_size");
    check_presence(allows_sensor, spec.sensor.has_value(), "sensor", true);

    if (spec.opacity && !(*spec.opacity >= 0.0 && *spec.opacity <= 1.0))
        throw ParameterError("opacity must lie in [0, 1]");
    if (spec.drop_percent && !(*spec.drop_percent >= 0.0 && *spec.drop_percent <= 99.0))
        throw ParameterError("drop_percent must lie in [0, 99]");
    if (spec.noise_sigma && !(*spec.noise_sigma >= 0.0 && std::isfinite(*spec.noise_sigma)))
        throw ParameterError("noise_sigma must be a finite value >= 0");
    if (spec.cone_angle_deg && !(*spec.cone_angle_deg >= 0.0 && *spec.cone_angle_deg <= 360.0))
        throw ParameterError("cone_angle_deg must lie in [0, 360]");
    if (spec.soiling_kernel_size &&
        (*spec.soiling_kernel_size < 3 || *spec.soiling_kernel_size % 2 == 0))
        throw ParameterError("soiling_kernel_size must be odd and >= 3");
}

// Camera presets only carry an opacity; other kinds have no preset.
inline OcclusionSpec severity_to_spec(OcclusionKind kind, SeverityPreset preset, std::uint64_t seed) {
    switch (kind) {
        case OcclusionKind::Dirt:
        case OcclusionKind::WaterBlur:
        case OcclusionKind::Scratch:
            return OcclusionSpec{.kind = kind, .opacity = preset_opacity(preset), .seed = seed};
        default:
            throw ParameterError("no severity preset defined for " + std::string(to_string(kind)));
    }
}

// Directory-safe identifier, e.g. "dirt_0.2", "angle_drop_front_30".
inline std::string spec_id(const OcclusionSpec& spec) {
    std::string id(to_string(spec.kind));
    if (spec.opacity) id += "_" + detail::format_number(*spec.opacity);
    if (spec.soiling_kernel_size) id += "_k" + std::to_string(*spec.soiling_kernel_size);
    if (spec.sensor) id += "_" + std::string(to_string(*spec.sensor));
    if (spec.drop_percent) id += "_" + detail::format_number(*spec.drop_percent);
    if (spec.noise_sigma) id += "_" + detail::format_number(*spec.noise_sigma);
    if (spec.region) id += "_" + std::string(to_string(*spec.region));
    if (spec.cone_angle_deg) id += "_" + detail::format_number(*spec.cone_angle_deg);
    return id;
}

inline void to_json(nlohmann::json& j, const OcclusionSpec& spec) {
    j = nlohmann::json::object();
    j["kind"] = std::string(to_string(spec.kind));
    if (spec.opacity) j["opacity"] = *spec.opacity;
    if (spec.drop_percent) j["drop_percent"] = *spec.drop_percent;
    if (spec.noise_sigma) j["noise_sigma"] = *spec.noise_sigma;
    if (spec.region) j["region"] = std::string(to_string(*spec.region));
    if (spec.cone_angle_deg) j["cone_angle_deg"] = *spec.cone_angle_deg;
    if (spec.soiling_kernel_size) j["soiling_kernel_size"] = *spec.soiling_kernel_size;
    if (spec.sensor) j["sensor"] = std::string(to_string(*spec.sensor));
    j["seed"] = spec.seed;
}

// Accepts either explicit parameters or {"kind": ..., "severity": "light"}.
// A missing "seed" defaults to `default_seed`.
inline OcclusionSpec spec_from_json(const nlohmann::json& j, std::uint64_t default_seed = 0) {
    if (!j.is_object()) throw ParameterError("occlusion spec must be a JSON object");
    try {
        const auto kind = parse_kind(j.at("kind").get<std::string>());
        const std::uint64_t seed = j.contains("seed") ? j.at("seed").get<std::uint64_t>() : default_seed;
        OcclusionSpec spec;
        if (j.contains("severity")) {
            spec = severity_to_spec(kind, parse_severity(j.at("severity").get<std::string>()), seed);
        } else {
            spec.kind = kind;
            spec.seed = seed;
        }
        if (j.contains("opacity")) spec.opacity = j.at("opacity").get<double>();
        if (j.contains("drop_percent")) spec.drop_percent = j.at("drop_percent").get<double>();
        if (j.contains("noise_sigma")) spec.noise_sigma = j.at("noise_sigma").get<double>();
        if (j.contains("region")) spec.region = parse_region(j.at("region").get<std::string>());
        if (j.contains("cone_angle_deg")) spec.cone_angle_deg = j.at("cone_angle_deg").get<double>();
        if (j.contains("soiling_kernel_size"))
            spec.soiling_kernel_size = j.at("soiling_kernel_size").get<int>();
        if (j.contains("sensor")) spec.sensor = parse_radar_sensor(j.at("sensor").get<std::string>());
        validate(spec);
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ParameterError(std::string("malformed occlusion spec: ") + e.what());
    }
}

inline void from_json(const nlohmann::json& j, OcclusionSpec& spec) { spec = spec_from_json(j); }

}  // namespace occlusion
