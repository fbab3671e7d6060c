#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "occlusion/error.hpp"

namespace occlusion {

// 8-bit interleaved RGB raster, row-major.
class ImageBuffer {
public:
    static constexpr int kChannels = 3;

    ImageBuffer() = default;
    ImageBuffer(int width, int height, std::uint8_t fill = 0) : width_(width), height_(height) {
        if (width <= 0 || height <= 0) throw ShapeError("image dimensions must be positive");
        data_.assign(static_cast<std::size_t>(width) * height * kChannels, fill);
    }
    ImageBuffer(int width, int height, std::vector<std::uint8_t> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (width <= 0 || height <= 0) throw ShapeError("image dimensions must be positive");
        if (data_.size() != static_cast<std::size_t>(width) * height * kChannels)
            throw ShapeError("pixel buffer length does not match " + std::to_string(width) + "x" +
                             std::to_string(height) + "x3");
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }
    bool empty() const noexcept { return data_.empty(); }

    std::uint8_t& at(int x, int y, int c) {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
    }
    std::uint8_t at(int x, int y, int c) const {
        return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
    }

    std::span<std::uint8_t> bytes() noexcept { return data_; }
    std::span<const std::uint8_t> bytes() const noexcept { return data_; }

    bool same_shape(const ImageBuffer& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

    bool operator==(const ImageBuffer&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

// Single-channel real raster. The tag separates masks with different
// invariants at the type level.
template <typename Tag>
class Plane {
public:
    Plane() = default;
    Plane(int width, int height, float fill = 0.0f) : width_(width), height_(height) {
        if (width <= 0 || height <= 0) throw ShapeError("plane dimensions must be positive");
        values_.assign(static_cast<std::size_t>(width) * height, fill);
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    float& at(int x, int y) { return values_[static_cast<std::size_t>(y) * width_ + x]; }
    float at(int x, int y) const { return values_[static_cast<std::size_t>(y) * width_ + x]; }

    std::span<float> values() noexcept { return values_; }
    std::span<const float> values() const noexcept { return values_; }

    float max_value() const noexcept {
        return values_.empty() ? 0.0f : *std::max_element(values_.begin(), values_.end());
    }

    template <typename OtherTag>
    bool same_shape(const Plane<OtherTag>& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }
    bool same_shape(const ImageBuffer& img) const noexcept {
        return width_ == img.width() && height_ == img.height();
    }

    bool operator==(const Plane&) const = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<float> values_;
};

struct AlphaTag {};
struct AdditiveTag {};

// Per-pixel weight in [0, 1].
using AlphaMask = Plane<AlphaTag>;
// Per-pixel non-negative intensity on the 0-255 scale, applied before clipping.
using AdditiveLayer = Plane<AdditiveTag>;

// Color content plus per-pixel alpha; both sized to the target frame.
struct OverlayLayer {
    ImageBuffer color;
    AlphaMask alpha;
};

// Planar 3-channel real image used for intermediate arithmetic.
class FloatImage {
public:
    FloatImage() = default;
    FloatImage(int width, int height, double fill = 0.0) : width_(width), height_(height) {
        if (width <= 0 || height <= 0) throw ShapeError("image dimensions must be positive");
        data_.assign(static_cast<std::size_t>(width) * height * 3, fill);
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }

    std::span<double> channel(int c) noexcept {
        const std::size_t n = static_cast<std::size_t>(width_) * height_;
        return std::span<double>(data_).subspan(static_cast<std::size_t>(c) * n, n);
    }
    std::span<const double> channel(int c) const noexcept {
        const std::size_t n = static_cast<std::size_t>(width_) * height_;
        return std::span<const double>(data_).subspan(static_cast<std::size_t>(c) * n, n);
    }

    double& at(int x, int y, int c) { return channel(c)[static_cast<std::size_t>(y) * width_ + x]; }
    double at(int x, int y, int c) const {
        return channel(c)[static_cast<std::size_t>(y) * width_ + x];
    }

    bool same_shape(const ImageBuffer& img) const noexcept {
        return width_ == img.width() && height_ == img.height();
    }
    bool same_shape(const FloatImage& other) const noexcept {
        return width_ == other.width_ && height_ == other.height_;
    }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

inline FloatImage to_float(const ImageBuffer& img) {
    FloatImage out(img.width(), img.height());
    const auto px = img.bytes();
    for (int c = 0; c < 3; ++c) {
        auto dst = out.channel(c);
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = px[i * 3 + static_cast<std::size_t>(c)];
    }
    return out;
}

// The single quantization point: round half away from zero, then clip.
inline std::uint8_t quantize_pixel(double value) noexcept {
    const double r = std::round(value);
    if (!(r > 0.0)) return 0;  // also maps NaN to 0
    if (r >= 255.0) return 255;
    return static_cast<std::uint8_t>(r);
}

inline ImageBuffer quantize(const FloatImage& img) {
    ImageBuffer out(img.width(), img.height());
    auto px = out.bytes();
    for (int c = 0; c < 3; ++c) {
        const auto src = img.channel(c);
        for (std::size_t i = 0; i < src.size(); ++i)
            px[i * 3 + static_cast<std::size_t>(c)] = quantize_pixel(src[i]);
    }
    return out;
}

// Rec. 601 luma, real-valued.
inline double luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
    return 0.299 * r + 0.587 * g + 0.114 * b;
}

inline std::vector<double> luma_plane(const ImageBuffer& img) {
    std::vector<double> out(img.pixel_count());
    const auto px = img.bytes();
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = luma(px[3 * i], px[3 * i + 1], px[3 * i + 2]);
    return out;
}

}  // namespace occlusion
