#pragma once

#include <algorithm>
#include <array>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "occlusion/camera/image.hpp"
#include "occlusion/camera/textures.hpp"
#include "occlusion/core/rng.hpp"
#include "occlusion/error.hpp"

namespace occlusion {

inline constexpr int kDirtGridSize = 10;
inline constexpr double kDirtMinBrightnessWeight = 0.25;

struct GridCell {
    int x0, y0, x1, y1;  // half-open

    int width() const noexcept { return x1 - x0; }
    int height() const noexcept { return y1 - y0; }
    bool operator==(const GridCell&) const = default;
};

// n x n cells; boundaries at floor(i * W / n) so every pixel belongs to
// exactly one cell even when W is not divisible by n.
inline std::vector<GridCell> dirt_grid(int width, int height, int n = kDirtGridSize) {
    std::vector<GridCell> cells;
    cells.reserve(static_cast<std::size_t>(n) * n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            cells.push_back({static_cast<int>(static_cast<long>(i) * width / n),
                             static_cast<int>(static_cast<long>(j) * height / n),
                             static_cast<int>(static_cast<long>(i + 1) * width / n),
                             static_cast<int>(static_cast<long>(j + 1) * height / n)});
        }
    }
    return cells;
}

// clamp(mean luma / 255, 0.25, 1) with luma = (R + G + B) / 3.
inline double brightness_weight(const ImageBuffer& img, const GridCell& cell) {
    if (cell.width() <= 0 || cell.height() <= 0) return kDirtMinBrightnessWeight;
    double sum = 0.0;
    for (int y = cell.y0; y < cell.y1; ++y)
        for (int x = cell.x0; x < cell.x1; ++x)
            sum += (img.at(x, y, 0) + img.at(x, y, 1) + img.at(x, y, 2)) / 3.0;
    const double mean = sum / (static_cast<double>(cell.width()) * cell.height());
    return std::clamp(mean / 255.0, kDirtMinBrightnessWeight, 1.0);
}

// Fraction of grid cells receiving a patch at a given opacity:
// 0.1 -> 0.5, 0.2 -> 0.75, 0.3 and above -> 1.
inline double dirt_density_for_opacity(double opacity) {
    return std::clamp(0.25 + 2.5 * opacity, 0.0, 1.0);
}

struct DirtOptions {
    // Pre-weighting amplitude of M0, M1, M2 on the 0-255 scale.
    std::array<double, 3> base_amplitudes{40.0, 80.0, 120.0};
    // Probability that a cell receives a patch in each layer.
    double density = 1.0;
    // Patch side relative to the larger cell edge.
    double min_scale = 0.6;
    double max_scale = 1.8;
    // Per-channel multiplier applied to the summed layers; {1,1,1} is grey.
    std::array<double, 3> tint{1.0, 1.0, 1.0};
    // External patch masks; when empty, procedural blobs are used.
    const std::vector<AlphaMask>* patches = nullptr;
};

// Builds the three obstruction layers. Every cell of every layer draws the
// same random values regardless of density, and a patch is kept when its
// presence draw falls below density. A higher density therefore yields a
// superset of the patches of a lower one for the same stream.
inline std::array<AdditiveLayer, 3> generate_dirt_layers(const ImageBuffer& img, RngStream& rng,
                                                         const DirtOptions& options = {}) {
    const auto cells = dirt_grid(img.width(), img.height());
    std::vector<double> weights;
    weights.reserve(cells.size());
    for (const auto& cell : cells) weights.push_back(brightness_weight(img, cell));

    std::array<AdditiveLayer, 3> layers{AdditiveLayer(img.width(), img.height()),
                                        AdditiveLayer(img.width(), img.height()),
                                        AdditiveLayer(img.width(), img.height())};
    for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto& cell = cells[i];
            const double presence = rng.uniform();
            const double scale = rng.uniform(options.min_scale, options.max_scale);
            const double rotation = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double ox = rng.uniform(), oy = rng.uniform();
            const std::uint64_t pick = rng.next_u64();
            if (presence >= options.density || cell.width() <= 0 || cell.height() <= 0) continue;

            Placement p;
            p.center_x = cell.x0 + ox * cell.width();
            p.center_y = cell.y0 + oy * cell.height();
            p.size_px = scale * std::max(cell.width(), cell.height());
            p.rotation = rotation;
            p.amplitude = options.base_amplitudes[k] * weights[i];
            if (options.patches && !options.patches->empty()) {
                stamp_max(layers[k], (*options.patches)[pick % options.patches->size()], p);
            } else {
                RngStream patch_rng = rng.child("dirt/" + std::to_string(k) + "/" + std::to_string(i));
                stamp_max(layers[k], procedural_blob(patch_rng), p);
            }
        }
    }
    return layers;
}

// I' = clip(I + opacity * tint_c * (M0 + M1 + M2), 0, 255).
inline ImageBuffer apply_dirt_layers(const ImageBuffer& img, double opacity,
                                     const std::array<AdditiveLayer, 3>& layers,
                                     const std::array<double, 3>& tint = {1.0, 1.0, 1.0}) {
    if (!(opacity >= 0.0 && opacity <= 1.0)) throw ParameterError("opacity must lie in [0, 1]");
    for (const auto& layer : layers)
        if (!layer.same_shape(img)) throw ShapeError("dirt layer does not match image dimensions");
    ImageBuffer out = img;
    if (opacity == 0.0) return out;
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            const double sum = static_cast<double>(layers[0].at(x, y)) + layers[1].at(x, y) + layers[2].at(x, y);
            if (sum == 0.0) continue;
            for (int c = 0; c < 3; ++c)
                out.at(x, y, c) = quantize_pixel(img.at(x, y, c) + opacity * tint[static_cast<std::size_t>(c)] * sum);
        }
    }
    return out;
}

// Density follows dirt_density_for_opacity unless options override it.
inline ImageBuffer apply_dirt(const ImageBuffer& img, double opacity, RngStream& rng,
                              std::optional<DirtOptions> options = std::nullopt) {
    if (!(opacity >= 0.0 && opacity <= 1.0)) throw ParameterError("opacity must lie in [0, 1]");
    DirtOptions opts = options.value_or(DirtOptions{});
    if (!options) opts.density = dirt_density_for_opacity(opacity);
    const auto layers = generate_dirt_layers(img, rng, opts);
    return apply_dirt_layers(img, opacity, layers, opts.tint);
}

}  // namespace occlusion
