#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "occlusion/error.hpp"

namespace occlusion {

enum class ScalarKind : char { Signed = 'I', Unsigned = 'U', Float = 'F' };

struct FieldSpec {
    std::string name;
    ScalarKind kind = ScalarKind::Float;
    int size = 4;   // bytes per element
    int count = 1;  // elements per point

    std::size_t width() const noexcept { return static_cast<std::size_t>(size) * static_cast<std::size_t>(count); }
    bool operator==(const FieldSpec&) const = default;
};

// Ordered field layout of one packed point record.
class Schema {
public:
    Schema() = default;
    explicit Schema(std::vector<FieldSpec> fields) : fields_(std::move(fields)) {
        offsets_.reserve(fields_.size());
        for (const auto& f : fields_) {
            if (f.size <= 0 || f.count <= 0) throw InputError("field '" + f.name + "' has non-positive width");
            offsets_.push_back(record_size_);
            record_size_ += f.width();
        }
    }

    const std::vector<FieldSpec>& fields() const noexcept { return fields_; }
    std::size_t record_size() const noexcept { return record_size_; }
    std::size_t offset(std::size_t field) const { return offsets_.at(field); }

    std::optional<std::size_t> find(std::string_view name) const noexcept {
        for (std::size_t i = 0; i < fields_.size(); ++i)
            if (fields_[i].name == name) return i;
        return std::nullopt;
    }

    bool operator==(const Schema& other) const noexcept { return fields_ == other.fields_; }

private:
    std::vector<FieldSpec> fields_;
    std::vector<std::size_t> offsets_;
    std::size_t record_size_ = 0;
};

namespace detail {

template <typename T>
T load_le(const std::byte* p) noexcept {
    T value;
    if constexpr (std::endian::native == std::endian::little) {
        std::memcpy(&value, p, sizeof(T));
    } else {
        std::byte tmp[sizeof(T)];
        std::reverse_copy(p, p + sizeof(T), tmp);
        std::memcpy(&value, tmp, sizeof(T));
    }
    return value;
}

template <typename T>
void store_le(std::byte* p, T value) noexcept {
    if constexpr (std::endian::native == std::endian::little) {
        std::memcpy(p, &value, sizeof(T));
    } else {
        std::byte tmp[sizeof(T)];
        std::memcpy(tmp, &value, sizeof(T));
        std::reverse_copy(tmp, tmp + sizeof(T), p);
    }
}

}  // namespace detail

// Schema-described packed point records (little-endian scalars). x, y, z
// must be present as single 32- or 64-bit float fields; every other field is
// carried as opaque bytes.
class PointCloud {
public:
    PointCloud() = default;

    PointCloud(Schema schema, std::vector<std::byte> payload)
        : schema_(std::move(schema)), data_(std::move(payload)) {
        const std::size_t rs = schema_.record_size();
        if (rs == 0) throw InputError("point schema is empty");
        if (data_.size() % rs != 0)
            throw InputError("payload length " + std::to_string(data_.size()) +
                             " is not a multiple of record size " + std::to_string(rs));
        count_ = data_.size() / rs;
        for (const char* axis : {"x", "y", "z"}) {
            const auto idx = schema_.find(axis);
            if (!idx) throw InputError(std::string("point schema lacks field '") + axis + "'");
            const auto& f = schema_.fields()[*idx];
            if (f.kind != ScalarKind::Float || (f.size != 4 && f.size != 8) || f.count != 1)
                throw InputError(std::string("field '") + axis + "' must be a scalar F4 or F8");
            axis_offset_[axis_slot(axis)] = schema_.offset(*idx);
            axis_double_[axis_slot(axis)] = f.size == 8;
        }
    }

    const Schema& schema() const noexcept { return schema_; }
    std::size_t size() const noexcept { return count_; }
    bool empty() const noexcept { return count_ == 0; }
    std::size_t record_size() const noexcept { return schema_.record_size(); }

    std::span<const std::byte> payload() const noexcept { return data_; }

    std::span<const std::byte> record(std::size_t i) const {
        return std::span<const std::byte>(data_).subspan(i * record_size(), record_size());
    }

    // axis: 0 = x, 1 = y, 2 = z
    double coord(std::size_t i, int axis) const {
        const std::byte* p = data_.data() + i * record_size() + axis_offset_[static_cast<std::size_t>(axis)];
        return axis_double_[static_cast<std::size_t>(axis)] ? detail::load_le<double>(p)
                                                            : static_cast<double>(detail::load_le<float>(p));
    }
    double x(std::size_t i) const { return coord(i, 0); }
    double y(std::size_t i) const { return coord(i, 1); }
    double z(std::size_t i) const { return coord(i, 2); }

    // Stores into the field's native width (float fields round to nearest).
    void set_coord(std::size_t i, int axis, double value) {
        std::byte* p = data_.data() + i * record_size() + axis_offset_[static_cast<std::size_t>(axis)];
        if (axis_double_[static_cast<std::size_t>(axis)])
            detail::store_le<double>(p, value);
        else
            detail::store_le<float>(p, static_cast<float>(value));
    }

    // Byte range [offset, offset + width) of each axis inside a record.
    std::size_t axis_offset(int axis) const noexcept { return axis_offset_[static_cast<std::size_t>(axis)]; }
    std::size_t axis_width(int axis) const noexcept { return axis_double_[static_cast<std::size_t>(axis)] ? 8 : 4; }

    // New cloud holding the records whose indices are given, in that order.
    PointCloud select(std::span<const std::size_t> indices) const {
        std::vector<std::byte> out(indices.size() * record_size());
        std::byte* dst = out.data();
        for (std::size_t i : indices) {
            const auto rec = record(i);
            std::memcpy(dst, rec.data(), rec.size());
            dst += rec.size();
        }
        return PointCloud(schema_, std::move(out));
    }

    PointCloud empty_like() const { return PointCloud(schema_, {}); }

    bool operator==(const PointCloud& other) const noexcept {
        return schema_ == other.schema_ && data_ == other.data_;
    }

private:
    static std::size_t axis_slot(std::string_view axis) noexcept { return axis == "x" ? 0 : axis == "y" ? 1 : 2; }

    Schema schema_;
    std::size_t count_ = 0;
    std::vector<std::byte> data_;
    std::size_t axis_offset_[3] = {0, 0, 0};
    bool axis_double_[3] = {false, false, false};
};

// Schema of nuScenes LiDAR sweeps: five float32 fields.
inline Schema lidar_schema() {
    return Schema({{"x", ScalarKind::Float, 4, 1},
                   {"y", ScalarKind::Float, 4, 1},
                   {"z", ScalarKind::Float, 4, 1},
                   {"intensity", ScalarKind::Float, 4, 1},
                   {"ring", ScalarKind::Float, 4, 1}});
}

// Convenience for tests and tools: build a float32 cloud from xyz triples and
// optional extra float32 fields appended after z.
inline PointCloud make_xyz_cloud(std::span<const std::array<float, 3>> points) {
    Schema schema({{"x", ScalarKind::Float, 4, 1}, {"y", ScalarKind::Float, 4, 1}, {"z", ScalarKind::Float, 4, 1}});
    std::vector<std::byte> payload(points.size() * 12);
    for (std::size_t i = 0; i < points.size(); ++i)
        for (int a = 0; a < 3; ++a)
            detail::store_le<float>(payload.data() + i * 12 + static_cast<std::size_t>(a) * 4,
                                    points[i][static_cast<std::size_t>(a)]);
    return PointCloud(std::move(schema), std::move(payload));
}

}  // namespace occlusion
