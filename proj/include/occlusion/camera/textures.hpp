#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "occlusion/camera/image.hpp"
#include "occlusion/core/rng.hpp"

namespace occlusion {

// Procedural stand-ins for the external dirt/droplet/scratch/soiling assets.
// All textures are AlphaMasks with values in [0, 1]; the unit square of the
// texture maps to a patch that is later scaled, rotated and placed.

namespace detail {

inline double smoothstep(double edge0, double edge1, double x) noexcept {
    const double t = std::clamp((x - edge0) / (edge1 - edge0), 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

}  // namespace detail

// Irregular blob: a few Gaussian bumps near the centre, thresholded with a
// soft edge. Alpha is zero on the texture border.
inline AlphaMask procedural_blob(RngStream& rng, int size = 64) {
    const int bumps = 3 + static_cast<int>(rng.uniform_index(4));
    struct Bump {
        double cx, cy, sigma, weight;
    };
    std::vector<Bump> list;
    for (int i = 0; i < bumps; ++i) {
        list.push_back({rng.uniform(-0.18, 0.18), rng.uniform(-0.18, 0.18), rng.uniform(0.08, 0.16),
                        rng.uniform(0.6, 1.0)});
    }
    std::vector<double> field(static_cast<std::size_t>(size) * size);
    double peak = 0.0;
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double px = (x + 0.5) / size - 0.5;
            const double py = (y + 0.5) / size - 0.5;
            double v = 0.0;
            for (const auto& b : list) {
                const double dx = px - b.cx, dy = py - b.cy;
                v += b.weight * std::exp(-(dx * dx + dy * dy) / (2.0 * b.sigma * b.sigma));
            }
            field[static_cast<std::size_t>(y) * size + x] = v;
            peak = std::max(peak, v);
        }
    }
    AlphaMask out(size, size);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double v = field[static_cast<std::size_t>(y) * size + x] / peak;
            // fade to zero near the border so stamped patches never show square edges
            const double px = std::abs((x + 0.5) / size - 0.5), py = std::abs((y + 0.5) / size - 0.5);
            const double border = 1.0 - detail::smoothstep(0.42, 0.5, std::max(px, py));
            out.at(x, y) = static_cast<float>(detail::smoothstep(0.35, 0.55, v) * border);
        }
    }
    return out;
}

// Elongated droplet streak used to build water-blur kernels.
inline AlphaMask procedural_streak(RngStream& rng, int size = 31) {
    const double long_sigma = rng.uniform(0.22, 0.32);
    const double short_sigma = rng.uniform(0.06, 0.12);
    AlphaMask out(size, size);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double px = (x + 0.5) / size - 0.5;
            const double py = (y + 0.5) / size - 0.5;
            out.at(x, y) = static_cast<float>(std::exp(-(px * px) / (2 * long_sigma * long_sigma) -
                                                       (py * py) / (2 * short_sigma * short_sigma)));
        }
    }
    return out;
}

// Bilinear lookup in texture pixel coordinates; zero outside.
template <typename Tag>
double sample_bilinear(const Plane<Tag>& tex, double x, double y) noexcept {
    x -= 0.5;
    y -= 0.5;
    const double fx = std::floor(x), fy = std::floor(y);
    const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
    const double tx = x - fx, ty = y - fy;
    auto get = [&](int xi, int yi) -> double {
        if (xi < 0 || yi < 0 || xi >= tex.width() || yi >= tex.height()) return 0.0;
        return tex.at(xi, yi);
    };
    return (1 - ty) * ((1 - tx) * get(x0, y0) + tx * get(x0 + 1, y0)) +
           ty * ((1 - tx) * get(x0, y0 + 1) + tx * get(x0 + 1, y0 + 1));
}

// Placement of a texture into a target frame.
struct Placement {
    double center_x = 0.0;
    double center_y = 0.0;
    double size_px = 1.0;     // side length the texture's longer edge maps to
    double rotation = 0.0;    // radians
    double amplitude = 1.0;
};

// Writes max(target, amplitude * texture) under the placement.
template <typename Tag, typename TexTag>
void stamp_max(Plane<Tag>& target, const Plane<TexTag>& texture, const Placement& p) {
    const double tex_side = std::max(texture.width(), texture.height());
    const double scale = p.size_px / tex_side;  // target px per texture px
    if (!(scale > 0.0)) return;
    const double half_diag = 0.5 * p.size_px * std::numbers::sqrt2;
    const int x0 = std::max(0, static_cast<int>(std::floor(p.center_x - half_diag)));
    const int x1 = std::min(target.width() - 1, static_cast<int>(std::ceil(p.center_x + half_diag)));
    const int y0 = std::max(0, static_cast<int>(std::floor(p.center_y - half_diag)));
    const int y1 = std::min(target.height() - 1, static_cast<int>(std::ceil(p.center_y + half_diag)));
    const double c = std::cos(p.rotation), s = std::sin(p.rotation);
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dx = x + 0.5 - p.center_x, dy = y + 0.5 - p.center_y;
            // inverse rotation into texture frame
            const double tx = (c * dx + s * dy) / scale + 0.5 * texture.width();
            const double ty = (-s * dx + c * dy) / scale + 0.5 * texture.height();
            const double a = sample_bilinear(texture, tx, ty);
            if (a <= 0.0) continue;
            const float v = static_cast<float>(p.amplitude * a);
            float& dst = target.at(x, y);
            if (v > dst) dst = v;
        }
    }
}

// Bilinear resize of a mask to the given frame size.
template <typename Tag>
Plane<Tag> resize_plane(const Plane<Tag>& src, int width, int height) {
    Plane<Tag> out(width, height);
    const double sx = static_cast<double>(src.width()) / width;
    const double sy = static_cast<double>(src.height()) / height;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double fx = std::clamp((x + 0.5) * sx, 0.5, src.width() - 0.5);
            const double fy = std::clamp((y + 0.5) * sy, 0.5, src.height() - 0.5);
            out.at(x, y) = static_cast<float>(sample_bilinear(src, fx, fy));
        }
    }
    return out;
}

inline ImageBuffer resize_image(const ImageBuffer& src, int width, int height) {
    ImageBuffer out(width, height);
    const double sx = static_cast<double>(src.width()) / width;
    const double sy = static_cast<double>(src.height()) / height;
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, src.width() - 1.0);
            const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, src.height() - 1.0);
            const int x0 = static_cast<int>(fx), y0 = static_cast<int>(fy);
            const int x1 = std::min(x0 + 1, src.width() - 1), y1 = std::min(y0 + 1, src.height() - 1);
            const double tx = fx - x0, ty = fy - y0;
            for (int c = 0; c < 3; ++c) {
                const double v = (1 - ty) * ((1 - tx) * src.at(x0, y0, c) + tx * src.at(x1, y0, c)) +
                                 ty * ((1 - tx) * src.at(x0, y1, c) + tx * src.at(x1, y1, c));
                out.at(x, y, c) = quantize_pixel(v);
            }
        }
    }
    return out;
}

template <typename Tag>
Plane<Tag> flip_plane(const Plane<Tag>& src, bool horizontal, bool vertical) {
    Plane<Tag> out(src.width(), src.height());
    for (int y = 0; y < src.height(); ++y)
        for (int x = 0; x < src.width(); ++x)
            out.at(x, y) = src.at(horizontal ? src.width() - 1 - x : x, vertical ? src.height() - 1 - y : y);
    return out;
}

}  // namespace occlusion
