#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "occlusion/camera/image.hpp"
#include "occlusion/camera/textures.hpp"
#include "occlusion/core/rng.hpp"
#include "occlusion/error.hpp"

namespace occlusion {

// I' = (1 - a(x,y)) I + a(x,y) S, per pixel and channel. Convex, so the
// result never leaves [min(I,S), max(I,S)] and needs no clipping.
inline ImageBuffer apply_scratch(const ImageBuffer& img, const OverlayLayer& overlay) {
    if (!img.same_shape(overlay.color) || !overlay.alpha.same_shape(img))
        throw ShapeError("scratch overlay does not match image dimensions");
    ImageBuffer out(img.width(), img.height());
    const auto src = img.bytes();
    const auto tex = overlay.color.bytes();
    const auto alpha = overlay.alpha.values();
    auto dst = out.bytes();
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const double a = std::clamp(static_cast<double>(alpha[i]), 0.0, 1.0);
        for (std::size_t c = 0; c < 3; ++c) {
            const std::size_t j = 3 * i + c;
            if (a == 0.0) {
                dst[j] = src[j];
            } else {
                dst[j] = quantize_pixel((1.0 - a) * src[j] + a * tex[j]);
            }
        }
    }
    return out;
}

struct ScratchOptions {
    std::array<std::uint8_t, 3> color{235, 235, 230};
    // External single-channel scratch textures (alpha); procedural when empty.
    const std::vector<AlphaMask>* textures = nullptr;
};

namespace detail {

inline void draw_segment(AlphaMask& alpha, double ax, double ay, double bx, double by, double half_width,
                         double peak) {
    const double reach = half_width + 1.0;
    const int x0 = std::max(0, static_cast<int>(std::floor(std::min(ax, bx) - reach)));
    const int x1 = std::min(alpha.width() - 1, static_cast<int>(std::ceil(std::max(ax, bx) + reach)));
    const int y0 = std::max(0, static_cast<int>(std::floor(std::min(ay, by) - reach)));
    const int y1 = std::min(alpha.height() - 1, static_cast<int>(std::ceil(std::max(ay, by) + reach)));
    const double dx = bx - ax, dy = by - ay;
    const double len2 = dx * dx + dy * dy;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double px = x + 0.5 - ax, py = y + 0.5 - ay;
            const double t = len2 > 0.0 ? std::clamp((px * dx + py * dy) / len2, 0.0, 1.0) : 0.0;
            const double ex = px - t * dx, ey = py - t * dy;
            const double d = std::sqrt(ex * ex + ey * ey);
            const double a = peak * std::max(0.0, 1.0 - d / half_width);
            float& v = alpha.at(x, y);
            if (a > v) v = static_cast<float>(a);
        }
    }
}

}  // namespace detail

// Random thin polylines with a linear alpha falloff across their width.
// Severity in [0, 1] sets the scratch count and peak alpha.
inline AlphaMask procedural_scratches(int width, int height, double severity, RngStream& rng) {
    AlphaMask alpha(width, height);
    const int count = 3 + static_cast<int>(std::lround(std::clamp(severity, 0.0, 1.0) * 60.0));
    const double peak = std::min(1.0, severity / 0.3);
    const double diag = std::hypot(width, height);
    for (int i = 0; i < count; ++i) {
        double x = rng.uniform(0.0, width), y = rng.uniform(0.0, height);
        double heading = rng.uniform(0.0, 2.0 * std::numbers::pi);
        const int segments = 2 + static_cast<int>(rng.uniform_index(6));
        const double half_width = rng.uniform(0.6, 1.8);
        const double strength = peak * rng.uniform(0.6, 1.0);
        for (int s = 0; s < segments; ++s) {
            const double len = diag * rng.uniform(0.02, 0.08);
            heading += rng.uniform(-0.35, 0.35);
            const double nx = x + len * std::cos(heading), ny = y + len * std::sin(heading);
            detail::draw_segment(alpha, x, y, nx, ny, half_width, strength);
            x = nx;
            y = ny;
        }
    }
    return alpha;
}

// Full-frame overlay. With external textures one is picked at random,
// stretched to the frame and randomly flipped; its alpha is scaled by
// severity / 0.3 (capped at 1) so the heaviest preset uses the texture as is.
inline OverlayLayer generate_scratch_overlay(int width, int height, double severity, RngStream& rng,
                                             const ScratchOptions& options = {}) {
    OverlayLayer overlay{ImageBuffer(width, height), AlphaMask(width, height)};
    auto color = overlay.color.bytes();
    for (std::size_t i = 0; i < color.size(); ++i) color[i] = options.color[i % 3];

    if (options.textures && !options.textures->empty()) {
        const auto& tex = (*options.textures)[rng.uniform_index(options.textures->size())];
        const bool flip_h = rng.bernoulli(0.5), flip_v = rng.bernoulli(0.5);
        overlay.alpha = resize_plane(flip_plane(tex, flip_h, flip_v), width, height);
        const float gain = static_cast<float>(std::min(1.0, severity / 0.3));
        for (float& a : overlay.alpha.values()) a = std::clamp(a * gain, 0.0f, 1.0f);
    } else {
        overlay.alpha = procedural_scratches(width, height, severity, rng);
    }
    return overlay;
}

inline ImageBuffer apply_scratch(const ImageBuffer& img, double severity, RngStream& rng,
                                 const ScratchOptions& options = {}) {
    if (!(severity >= 0.0 && severity <= 1.0)) throw ParameterError("scratch severity must lie in [0, 1]");
    return apply_scratch(img, generate_scratch_overlay(img.width(), img.height(), severity, rng, options));
}

}  // namespace occlusion
