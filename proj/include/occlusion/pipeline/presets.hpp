#pragma once

#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "occlusion/core/spec.hpp"

namespace occlusion {

struct PresetRow {
    std::string modality;
    OcclusionKind kind;
    std::string label;
    std::string parameter;     // config / CLI parameter name
    std::string valid_range;   // accepted by validate()
    std::string setting;       // canonical range or setting
    std::vector<std::string> examples;
};

inline const std::vector<PresetRow>& preset_table() {
    static const std::vector<PresetRow> rows{
        {"camera", OcclusionKind::Dirt, "Dirt", "opacity", "[0, 1]", "0.1 – 0.3", {"light 0.1", "moderate 0.2", "heavy 0.3"}},
        {"camera", OcclusionKind::WaterBlur, "Water-blur", "opacity", "[0, 1]", "0.1 – 0.3", {"light 0.1", "moderate 0.2", "heavy 0.3"}},
        {"camera", OcclusionKind::Scratch, "Scratch", "opacity", "[0, 1]", "0.1 – 0.3", {"light 0.1", "moderate 0.2", "heavy 0.3"}},
        {"camera", OcclusionKind::Soiling, "Soiling mask", "soiling_kernel_size", "odd, >= 3",
         "(15×15), (51×51), (101×101), (251×251)", {"15", "51", "101", "251"}},
        {"radar", OcclusionKind::RadarSensorDrop, "Sensor drop", "sensor", "FRONT, FRONT_LEFT, FRONT_RIGHT, BACK_LEFT, BACK_RIGHT",
         "Drop 1 of 5 radars", {"random", "FRONT"}},
        {"radar", OcclusionKind::PointDropout, "Point dropout", "drop_percent", "[0, 99]", "0% – 99%", {"10", "50", "90"}},
        {"radar", OcclusionKind::GaussianNoise, "Gaussian noise", "noise_sigma", ">= 0 (m)", "0.1 – 2", {"0.1", "0.5", "2"}},
        {"lidar", OcclusionKind::RegionDrop, "Region drop", "region", "front, back, left, right", "front/back/left/right",
         {"front", "back", "left", "right"}},
        {"lidar", OcclusionKind::AngleDrop, "Angle occlusion", "region, cone_angle_deg", "[0, 360] deg",
         "e.g. Front (30°), 60°, 90°", {"front 30", "front 60", "front 90"}},
        {"lidar", OcclusionKind::PointDropout, "Random dropout", "drop_percent", "[0, 99]", "0% – 99%", {"10", "50", "90"}},
    };
    return rows;
}

inline nlohmann::json presets_json() {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : preset_table())
        rows.push_back({{"modality", r.modality},
                        {"kind", std::string(to_string(r.kind))},
                        {"label", r.label},
                        {"parameter", r.parameter},
                        {"valid_range", r.valid_range},
                        {"setting", r.setting},
                        {"examples", r.examples}});
    return {{"presets", rows},
            {"severity", {{"light", preset_opacity(SeverityPreset::Light)},
                          {"moderate", preset_opacity(SeverityPreset::Moderate)},
                          {"heavy", preset_opacity(SeverityPreset::Heavy)}}}};
}

inline std::string presets_json_text() { return presets_json().dump(2) + "\n"; }

inline std::string presets_text() {
    std::ostringstream os;
    os << std::left;
    os << std::setw(10) << "MODALITY" << std::setw(19) << "KIND" << std::setw(24) << "PARAMETER" << "SETTING\n";
    for (const auto& r : preset_table()) {
        os << std::setw(10) << r.modality << std::setw(19) << to_string(r.kind) << std::setw(24) << r.parameter
           << r.setting << "\n";
        os << std::setw(53) << "" << "accepts " << r.valid_range << "; e.g.";
        for (const auto& e : r.examples) os << " [" << e << "]";
        os << "\n";
    }
    os << "\nseverity presets (camera opacity): light " << preset_opacity(SeverityPreset::Light) << ", moderate "
       << preset_opacity(SeverityPreset::Moderate) << ", heavy " << preset_opacity(SeverityPreset::Heavy) << "\n";
    return os.str();
}

}  // namespace occlusion
