#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "occlusion/core/rng.hpp"
#include "occlusion/core/spec.hpp"
#include "occlusion/error.hpp"
#include "occlusion/pointcloud/point_cloud.hpp"

namespace occlusion {

// One frame of the five-radar rig.
using RadarScene = std::map<RadarSensor, PointCloud>;

struct SensorDropResult {
    RadarScene scene;
    RadarSensor dropped;
};

// `choice` if given, otherwise a uniform draw over the five sensors.
inline RadarSensor pick_dropped_sensor(std::optional<RadarSensor> choice, RngStream& rng) {
    return choice ? *choice : kAllRadarSensors[rng.uniform_index(kAllRadarSensors.size())];
}

// R' = R \ {r_drop}; r_drop is `choice` or drawn uniformly from the five.
inline SensorDropResult drop_sensor(const RadarScene& scene, std::optional<RadarSensor> choice, RngStream& rng) {
    for (RadarSensor s : kAllRadarSensors)
        if (!scene.contains(s))
            throw InputError("radar scene is missing sensor " + std::string(to_string(s)));
    if (scene.size() != kAllRadarSensors.size()) throw InputError("radar scene has unexpected sensors");
    const RadarSensor dropped = pick_dropped_sensor(choice, rng);
    SensorDropResult result{scene, dropped};
    result.scene.erase(dropped);
    return result;
}

inline SensorDropResult drop_sensor(const RadarScene& scene, std::string_view choice, RngStream& rng) {
    return drop_sensor(scene, parse_radar_sensor(choice), rng);
}

// floor(N (1 - p/100)). For integral p the product N * (100 - p) is exact,
// and the quotient by 100 cannot round across an integer for N < 2^40.
inline std::size_t retained_count(std::size_t n, double drop_percent) {
    if (!(drop_percent >= 0.0 && drop_percent <= 99.0)) throw ParameterError("drop percent must lie in [0, 99]");
    const double kept = std::floor(static_cast<double>(n) * (100.0 - drop_percent) / 100.0);
    return std::min(n, static_cast<std::size_t>(kept));
}

// Uniform sample without replacement of retained_count(N, p) records,
// original order kept (selection sampling).
inline PointCloud dropout_points(const PointCloud& cloud, double drop_percent, RngStream& rng) {
    const std::size_t n = cloud.size();
    const std::size_t keep = retained_count(n, drop_percent);
    if (keep == n) return cloud;
    std::vector<std::size_t> selected;
    selected.reserve(keep);
    for (std::size_t i = 0; i < n && selected.size() < keep; ++i) {
        const std::size_t remaining = n - i;
        const std::size_t needed = keep - selected.size();
        if (rng.uniform_index(remaining) < needed) selected.push_back(i);
    }
    return cloud.select(selected);
}

// p' = p + e, e ~ N(0, sigma^2 I) on x, y, z only. Draw order: x, y, z per
// point, points in storage order.
inline PointCloud add_gaussian_noise(const PointCloud& cloud, double sigma, RngStream& rng) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw ParameterError("noise sigma must be finite and >= 0");
    PointCloud out = cloud;
    if (sigma == 0.0) return out;
    for (std::size_t i = 0; i < out.size(); ++i)
        for (int axis = 0; axis < 3; ++axis) out.set_coord(i, axis, out.coord(i, axis) + sigma * rng.normal());
    return out;
}

// Half-plane: Front x > 0, Back x < 0, Left y < 0, Right y > 0. With
// swap_lateral the Left/Right signs follow the nuScenes convention
// (positive y to the left). Points on the dividing axis are never inside.
struct RegionSelector {
    Region region = Region::Front;
    bool swap_lateral = false;

    bool contains(double x, double y) const noexcept {
        switch (region) {
            case Region::Front: return x > 0.0;
            case Region::Back: return x < 0.0;
            case Region::Left: return swap_lateral ? y > 0.0 : y < 0.0;
            case Region::Right: return swap_lateral ? y < 0.0 : y > 0.0;
        }
        return false;
    }

    // Azimuth of the half-plane's centre direction, degrees in (-180, 180].
    double center_azimuth_deg() const noexcept {
        switch (region) {
            case Region::Front: return 0.0;
            case Region::Back: return 180.0;
            case Region::Left: return swap_lateral ? 90.0 : -90.0;
            case Region::Right: return swap_lateral ? -90.0 : 90.0;
        }
        return 0.0;
    }
};

// Region half-plane intersected with |wrap(theta - centre)| <= angle / 2,
// theta = atan2(y, x).
struct ConeSelector {
    Region region = Region::Front;
    double cone_angle_deg = 0.0;
    bool swap_lateral = false;

    bool contains(double x, double y) const noexcept {
        const RegionSelector half{region, swap_lateral};
        if (!half.contains(x, y)) return false;
        const double theta = std::atan2(y, x) * (180.0 / 3.14159265358979323846);
        double delta = theta - half.center_azimuth_deg();
        while (delta > 180.0) delta -= 360.0;
        while (delta <= -180.0) delta += 360.0;
        return std::abs(delta) <= cone_angle_deg / 2.0;
    }
};

template <typename Predicate>
PointCloud remove_points_if(const PointCloud& cloud, Predicate&& remove) {
    std::vector<std::size_t> kept;
    kept.reserve(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i)
        if (!remove(cloud.x(i), cloud.y(i))) kept.push_back(i);
    if (kept.size() == cloud.size()) return cloud;
    return cloud.select(kept);
}

inline PointCloud occlude_region(const PointCloud& cloud, const RegionSelector& region) {
    return remove_points_if(cloud, [&](double x, double y) { return region.contains(x, y); });
}

inline PointCloud occlude_angle(const PointCloud& cloud, const ConeSelector& cone) {
    if (!(cone.cone_angle_deg >= 0.0 && cone.cone_angle_deg <= 360.0))
        throw ParameterError("cone angle must lie in [0, 360]");
    return remove_points_if(cloud, [&](double x, double y) { return cone.contains(x, y); });
}

}  // namespace occlusion
