#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "occlusion/error.hpp"
#include "occlusion/pointcloud/point_cloud.hpp"

namespace occlusion {

inline constexpr std::size_t kLidarRecordSize = 20;

// nuScenes LiDAR sweep (.pcd.bin): little-endian float32 records of
// x, y, z, intensity, ring.
inline PointCloud read_lidar_bin(std::span<const std::byte> bytes) {
    if (bytes.size() % kLidarRecordSize != 0) {
        const std::size_t tail = bytes.size() - bytes.size() % kLidarRecordSize;
        throw MalformedFileError("lidar sweep length " + std::to_string(bytes.size()) +
                                     " is not a multiple of " + std::to_string(kLidarRecordSize) +
                                     "; trailing partial record",
                                 tail);
    }
    return PointCloud(lidar_schema(), std::vector<std::byte>(bytes.begin(), bytes.end()));
}

inline std::vector<std::byte> write_lidar_bin(const PointCloud& cloud) {
    if (!(cloud.schema() == lidar_schema())) throw InputError("cloud schema is not the LiDAR sweep layout");
    const auto payload = cloud.payload();
    return std::vector<std::byte>(payload.begin(), payload.end());
}

}  // namespace occlusion
