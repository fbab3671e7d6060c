#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "occlusion/camera/image.hpp"
#include "occlusion/error.hpp"

namespace occlusion {

// Odd-sized square kernel whose weights sum to 1. Index (u, v) runs over
// [-radius, radius]; weight(u, v) multiplies the source pixel (x-u, y-v).
class ConvKernel {
public:
    static ConvKernel identity() { return ConvKernel(1, {1.0}); }

    // Normalizes the given weights. Rejects even sizes and non-positive sums.
    static ConvKernel from_weights(int size, std::vector<double> weights) {
        if (size < 1 || size % 2 == 0) throw ParameterError("kernel size must be odd and positive");
        if (weights.size() != static_cast<std::size_t>(size) * size)
            throw ShapeError("kernel weight count does not match size");
        double sum = 0.0;
        for (double w : weights) {
            if (!std::isfinite(w) || w < 0.0) throw ParameterError("kernel weights must be finite and >= 0");
            sum += w;
        }
        if (!(sum > 0.0)) throw ParameterError("kernel weights sum to zero");
        for (double& w : weights) w /= sum;
        return ConvKernel(size, std::move(weights));
    }

    int size() const noexcept { return size_; }
    int radius() const noexcept { return size_ / 2; }
    double weight(int u, int v) const {
        return weights_[static_cast<std::size_t>(v + radius()) * size_ + (u + radius())];
    }
    std::span<const double> weights() const noexcept { return weights_; }

private:
    ConvKernel(int size, std::vector<double> weights) : size_(size), weights_(std::move(weights)) {}

    int size_;
    std::vector<double> weights_;
};

// Normalized 1-D Gaussian sampled at integer offsets.
inline std::vector<double> gaussian_weights_1d(int size, double sigma) {
    if (size < 3 || size % 2 == 0) throw ParameterError("gaussian size must be odd and >= 3");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ParameterError("gaussian sigma must be > 0");
    const int r = size / 2;
    std::vector<double> w(static_cast<std::size_t>(size));
    for (int i = -r; i <= r; ++i) w[static_cast<std::size_t>(i + r)] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& v : w) v /= sum;
    return w;
}

// 2-D Gaussian, built as the outer product of the 1-D weights. This is the
// same discrete kernel as sampling exp(-(u^2+v^2)/2s^2) on the grid and
// normalizing, and is exactly symmetric under 90-degree rotation.
inline ConvKernel gaussian_kernel(int size, double sigma) {
    const auto w = gaussian_weights_1d(size, sigma);
    std::vector<double> k(static_cast<std::size_t>(size) * size);
    for (int v = 0; v < size; ++v)
        for (int u = 0; u < size; ++u)
            k[static_cast<std::size_t>(v) * size + u] = w[static_cast<std::size_t>(v)] * w[static_cast<std::size_t>(u)];
    return ConvKernel::from_weights(size, std::move(k));
}

namespace detail {

inline int clamp_index(int i, int n) noexcept { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

// Direct 2-D convolution of one plane with replicate-edge padding.
inline void convolve_plane(std::span<const double> src, std::span<double> dst, int width, int height,
                           const ConvKernel& kernel) {
    const int r = kernel.radius();
    std::vector<double> padded(static_cast<std::size_t>(width + 2 * r));
    std::fill(dst.begin(), dst.end(), 0.0);
    for (int y = 0; y < height; ++y) {
        double* out = dst.data() + static_cast<std::size_t>(y) * width;
        for (int v = -r; v <= r; ++v) {
            const double* row = src.data() + static_cast<std::size_t>(clamp_index(y - v, height)) * width;
            for (int i = 0; i < width + 2 * r; ++i) padded[static_cast<std::size_t>(i)] = row[clamp_index(i - r, width)];
            for (int u = -r; u <= r; ++u) {
                const double w = kernel.weight(u, v);
                if (w == 0.0) continue;
                // out[x] += w * row[x - u]  ->  padded index x - u + r
                const double* shifted = padded.data() + (r - u);
                for (int x = 0; x < width; ++x) out[x] += w * shifted[x];
            }
        }
    }
}

// Separable pass along rows (horizontal) or columns, replicate padding.
inline void convolve_rows(std::span<const double> src, std::span<double> dst, int width, int height,
                          std::span<const double> taps) {
    const int r = static_cast<int>(taps.size()) / 2;
    std::vector<double> padded(static_cast<std::size_t>(width + 2 * r));
    for (int y = 0; y < height; ++y) {
        const double* row = src.data() + static_cast<std::size_t>(y) * width;
        double* out = dst.data() + static_cast<std::size_t>(y) * width;
        for (int i = 0; i < width + 2 * r; ++i) padded[static_cast<std::size_t>(i)] = row[clamp_index(i - r, width)];
        for (int x = 0; x < width; ++x) out[x] = 0.0;
        for (int u = -r; u <= r; ++u) {
            const double w = taps[static_cast<std::size_t>(u + r)];
            const double* shifted = padded.data() + (r - u);
            for (int x = 0; x < width; ++x) out[x] += w * shifted[x];
        }
    }
}

inline void convolve_cols(std::span<const double> src, std::span<double> dst, int width, int height,
                          std::span<const double> taps) {
    const int r = static_cast<int>(taps.size()) / 2;
    std::fill(dst.begin(), dst.end(), 0.0);
    for (int y = 0; y < height; ++y) {
        double* out = dst.data() + static_cast<std::size_t>(y) * width;
        for (int v = -r; v <= r; ++v) {
            const double w = taps[static_cast<std::size_t>(v + r)];
            const double* row = src.data() + static_cast<std::size_t>(clamp_index(y - v, height)) * width;
            for (int x = 0; x < width; ++x) out[x] += w * row[x];
        }
    }
}

}  // namespace detail

inline void convolve_plane(std::span<const double> src, std::span<double> dst, int width, int height,
                           const ConvKernel& kernel) {
    if (src.size() != static_cast<std::size_t>(width) * height || dst.size() != src.size())
        throw ShapeError("plane size does not match dimensions");
    detail::convolve_plane(src, dst, width, height, kernel);
}

// Per-channel convolution, replicate-edge padding.
inline FloatImage convolve(const FloatImage& img, const ConvKernel& kernel) {
    FloatImage out(img.width(), img.height());
    for (int c = 0; c < 3; ++c)
        detail::convolve_plane(img.channel(c), out.channel(c), img.width(), img.height(), kernel);
    return out;
}

// Separable convolution of a single plane (taps applied along x, then y).
inline std::vector<double> convolve_separable(std::span<const double> src, int width, int height,
                                              std::span<const double> taps) {
    if (src.size() != static_cast<std::size_t>(width) * height)
        throw ShapeError("plane size does not match dimensions");
    std::vector<double> tmp(src.size()), out(src.size());
    detail::convolve_rows(src, tmp, width, height, taps);
    detail::convolve_cols(tmp, out, width, height, taps);
    return out;
}

inline FloatImage gaussian_blur(const FloatImage& img, int size, double sigma) {
    const auto taps = gaussian_weights_1d(size, sigma);
    FloatImage out(img.width(), img.height());
    for (int c = 0; c < 3; ++c) {
        auto blurred = convolve_separable(img.channel(c), img.width(), img.height(), taps);
        std::copy(blurred.begin(), blurred.end(), out.channel(c).begin());
    }
    return out;
}

}  // namespace occlusion
