#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "occlusion/camera/convolution.hpp"
#include "occlusion/camera/image.hpp"
#include "occlusion/camera/textures.hpp"
#include "occlusion/core/rng.hpp"
#include "occlusion/error.hpp"

namespace occlusion {

struct WaterBlurOptions {
    int kernel_size = 15;
    double min_scale = 0.75;
    double max_scale = 1.5;
    // Droplets in the obstruction layer and their diameter as a fraction of
    // the shorter frame edge.
    int droplet_count = 40;
    double min_droplet_fraction = 0.04;
    double max_droplet_fraction = 0.14;
    // Inside a droplet the overlay shows a wide blur of the frame mixed
    // toward this grey level by `haze`.
    double haze = 0.35;
    double haze_level = 220.0;
    // External droplet masks; procedural when empty.
    const std::vector<AlphaMask>* droplets = nullptr;
};

// Rasterizes a droplet pattern into a k x k kernel with a uniform rotation in
// [0, 2pi) and a uniform scale in [min_scale, max_scale], then renormalizes.
// At max_scale the pattern spans the whole kernel window.
inline ConvKernel make_droplet_kernel(RngStream& rng, const WaterBlurOptions& options = {}) {
    const int k = options.kernel_size;
    if (k < 1 || k % 2 == 0) throw ParameterError("water-blur kernel size must be odd");
    const double rotation = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double scale = rng.uniform(options.min_scale, options.max_scale);
    const std::uint64_t pick = rng.next_u64();
    RngStream shape_rng = rng.child("water/kernel");
    AlphaMask pattern = (options.droplets && !options.droplets->empty())
                            ? (*options.droplets)[pick % options.droplets->size()]
                            : procedural_streak(shape_rng);
    if (k == 1) return ConvKernel::identity();

    AlphaMask raster(k, k);
    Placement p;
    p.center_x = k / 2.0;
    p.center_y = k / 2.0;
    p.size_px = k * scale / options.max_scale;
    p.rotation = rotation;
    stamp_max(raster, pattern, p);
    std::vector<double> weights(raster.values().begin(), raster.values().end());
    const int r = k / 2;
    if (raster.at(r, r) <= 0.0f) weights[static_cast<std::size_t>(r) * k + r] = 1.0;
    return ConvKernel::from_weights(k, std::move(weights));
}

// Obstruction layer O: the blurred frame everywhere, replaced inside
// droplets by a wide, hazed blur of it. Droplet coverage m is the max of the
// stamped droplet masks.
inline FloatImage make_droplet_overlay(const FloatImage& blurred, RngStream& rng,
                                       const WaterBlurOptions& options = {}) {
    const int w = blurred.width(), h = blurred.height();
    AlphaMask coverage(w, h);
    const double short_edge = std::min(w, h);
    for (int i = 0; i < options.droplet_count; ++i) {
        Placement p;
        p.center_x = rng.uniform(0.0, w);
        p.center_y = rng.uniform(0.0, h);
        p.size_px = short_edge * rng.uniform(options.min_droplet_fraction, options.max_droplet_fraction);
        p.rotation = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const std::uint64_t pick = rng.next_u64();
        if (options.droplets && !options.droplets->empty()) {
            stamp_max(coverage, (*options.droplets)[pick % options.droplets->size()], p);
        } else {
            RngStream drop_rng = rng.child("water/droplet/" + std::to_string(i));
            stamp_max(coverage, procedural_blob(drop_rng, 32), p);
        }
    }

    int wide = static_cast<int>(std::lround(short_edge * 0.05)) * 2 + 1;
    wide = std::max(wide, 3);
    const FloatImage diffuse = gaussian_blur(blurred, wide, wide / 6.0);
    FloatImage overlay(w, h);
    const auto m = coverage.values();
    for (int c = 0; c < 3; ++c) {
        const auto src = blurred.channel(c);
        const auto dif = diffuse.channel(c);
        auto dst = overlay.channel(c);
        for (std::size_t i = 0; i < dst.size(); ++i) {
            const double droplet = (1.0 - options.haze) * dif[i] + options.haze * options.haze_level;
            dst[i] = (1.0 - m[i]) * src[i] + m[i] * droplet;
        }
    }
    return overlay;
}

// I~ = I * K per channel, then I' = (1 - opacity) I~ + opacity O.
inline ImageBuffer apply_water_blur_with(const ImageBuffer& img, const ConvKernel& kernel,
                                         const FloatImage& overlay, double opacity) {
    if (!(opacity >= 0.0 && opacity <= 1.0)) throw ParameterError("opacity must lie in [0, 1]");
    if (!overlay.same_shape(img)) throw ShapeError("water-blur overlay does not match image dimensions");
    const FloatImage blurred = convolve(to_float(img), kernel);
    FloatImage out(img.width(), img.height());
    for (int c = 0; c < 3; ++c) {
        const auto b = blurred.channel(c);
        const auto o = overlay.channel(c);
        auto dst = out.channel(c);
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = (1.0 - opacity) * b[i] + opacity * o[i];
    }
    return quantize(out);
}

// Kernel and overlay draws do not depend on opacity, so a fixed stream gives
// the same droplets at every severity.
inline ImageBuffer apply_water_blur(const ImageBuffer& img, double opacity, RngStream& rng,
                                    const WaterBlurOptions& options = {}) {
    if (!(opacity >= 0.0 && opacity <= 1.0)) throw ParameterError("opacity must lie in [0, 1]");
    const ConvKernel kernel = make_droplet_kernel(rng, options);
    const FloatImage blurred = convolve(to_float(img), kernel);
    const FloatImage overlay = make_droplet_overlay(blurred, rng, options);
    FloatImage out(img.width(), img.height());
    for (int c = 0; c < 3; ++c) {
        const auto b = blurred.channel(c);
        const auto o = overlay.channel(c);
        auto dst = out.channel(c);
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = (1.0 - opacity) * b[i] + opacity * o[i];
    }
    return quantize(out);
}

}  // namespace occlusion
