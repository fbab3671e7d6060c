#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "occlusion/camera/convolution.hpp"
#include "occlusion/camera/image.hpp"
#include "occlusion/camera/textures.hpp"
#include "occlusion/core/rng.hpp"
#include "occlusion/error.hpp"

namespace occlusion {

inline constexpr std::array kSoilingKernelSizes = {15, 51, 101, 251};

inline double soiling_sigma(int kernel_size) noexcept { return kernel_size / 6.0; }

// Binary mask: 1 where the lens is soiled.
inline AlphaMask threshold_mask(const AlphaMask& mask, float threshold = 0.5f) {
    AlphaMask out(mask.width(), mask.height());
    auto dst = out.values();
    const auto src = mask.values();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] >= threshold ? 1.0f : 0.0f;
    return out;
}

// M' = G * M;  I_blurred = G * (I o M');  I' = I o (1 - M') + I_blurred,
// with G a normalized Gaussian of the given odd size and sigma = size / 6.
inline ImageBuffer apply_soiling(const ImageBuffer& img, const AlphaMask& mask, int kernel_size) {
    if (kernel_size < 3 || kernel_size % 2 == 0)
        throw ParameterError("soiling kernel size must be odd and >= 3");
    if (!mask.same_shape(img)) throw ShapeError("soiling mask does not match image dimensions");
    const int w = img.width(), h = img.height();
    const auto m = mask.values();
    for (float v : m)
        if (v != 0.0f && v != 1.0f) throw ParameterError("soiling mask must be binary");
    if (std::all_of(m.begin(), m.end(), [](float v) { return v == 0.0f; })) return img;

    const auto taps = gaussian_weights_1d(kernel_size, soiling_sigma(kernel_size));
    std::vector<double> mask_d(m.begin(), m.end());
    const std::vector<double> soft = convolve_separable(mask_d, w, h, taps);

    const FloatImage src = to_float(img);
    FloatImage out(w, h);
    std::vector<double> masked(soft.size());
    for (int c = 0; c < 3; ++c) {
        const auto in = src.channel(c);
        for (std::size_t i = 0; i < masked.size(); ++i) masked[i] = in[i] * soft[i];
        const auto blurred = convolve_separable(masked, w, h, taps);
        auto dst = out.channel(c);
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = in[i] * (1.0 - soft[i]) + blurred[i];
    }
    return quantize(out);
}

struct SoilingOptions {
    int min_blobs = 1;
    int max_blobs = 4;
    // Blob diameter relative to the shorter frame edge.
    double min_size = 0.25;
    double max_size = 0.7;
    // External masks (already thresholded or greyscale); procedural when empty.
    const std::vector<AlphaMask>* masks = nullptr;
};

inline AlphaMask generate_soiling_mask(int width, int height, RngStream& rng,
                                       const SoilingOptions& options = {}) {
    if (options.masks && !options.masks->empty()) {
        const auto& src = (*options.masks)[rng.uniform_index(options.masks->size())];
        return threshold_mask(resize_plane(src, width, height));
    }
    AlphaMask soft(width, height);
    const double short_edge = std::min(width, height);
    const int span = options.max_blobs - options.min_blobs + 1;
    const int blobs = options.min_blobs + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(std::max(span, 1))));
    for (int i = 0; i < blobs; ++i) {
        Placement p;
        p.center_x = rng.uniform(0.0, width);
        p.center_y = rng.uniform(0.0, height);
        p.size_px = short_edge * rng.uniform(options.min_size, options.max_size) * 1.6;
        p.rotation = rng.uniform(0.0, 2.0 * std::numbers::pi);
        RngStream blob_rng = rng.child("soiling/" + std::to_string(i));
        stamp_max(soft, procedural_blob(blob_rng), p);
    }
    return threshold_mask(soft);
}

inline ImageBuffer apply_soiling(const ImageBuffer& img, int kernel_size, RngStream& rng,
                                 const SoilingOptions& options = {}) {
    return apply_soiling(img, generate_soiling_mask(img.width(), img.height(), rng, options), kernel_size);
}

}  // namespace occlusion
