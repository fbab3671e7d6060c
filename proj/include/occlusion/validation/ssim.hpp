#pragma once

#include <span>
#include <vector>

#include "occlusion/camera/convolution.hpp"
#include "occlusion/camera/image.hpp"
#include "occlusion/error.hpp"

namespace occlusion {

// Gaussian-window SSIM on the luma plane (Wang et al. defaults).
struct SsimParams {
    int window = 11;
    double window_sigma = 1.5;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 255.0;
};

namespace detail {

// Separable correlation keeping only positions where the full window fits.
inline std::vector<double> filter_valid(std::span<const double> src, int width, int height,
                                        std::span<const double> taps) {
    const int k = static_cast<int>(taps.size());
    const int ow = width - k + 1, oh = height - k + 1;
    std::vector<double> tmp(static_cast<std::size_t>(ow) * height);
    for (int y = 0; y < height; ++y) {
        const double* row = src.data() + static_cast<std::size_t>(y) * width;
        double* out = tmp.data() + static_cast<std::size_t>(y) * ow;
        for (int x = 0; x < ow; ++x) {
            double acc = 0.0;
            for (int i = 0; i < k; ++i) acc += taps[static_cast<std::size_t>(i)] * row[x + i];
            out[x] = acc;
        }
    }
    std::vector<double> out(static_cast<std::size_t>(ow) * oh, 0.0);
    for (int y = 0; y < oh; ++y) {
        double* dst = out.data() + static_cast<std::size_t>(y) * ow;
        for (int i = 0; i < k; ++i) {
            const double w = taps[static_cast<std::size_t>(i)];
            const double* row = tmp.data() + static_cast<std::size_t>(y + i) * ow;
            for (int x = 0; x < ow; ++x) dst[x] += w * row[x];
        }
    }
    return out;
}

}  // namespace detail

// Mean SSIM over valid window positions of two real planes.
inline double ssim_planes(std::span<const double> a, std::span<const double> b, int width, int height,
                          const SsimParams& params = {}) {
    if (a.size() != b.size() || a.size() != static_cast<std::size_t>(width) * height)
        throw ShapeError("SSIM planes differ in size");
    if (width < params.window || height < params.window)
        throw ShapeError("image smaller than the SSIM window");
    if (!(params.k1 > 0.0 && params.k2 > 0.0)) throw ParameterError("SSIM stabilizers must be positive");

    const auto taps = gaussian_weights_1d(params.window, params.window_sigma);
    std::vector<double> aa(a.size()), bb(a.size()), ab(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        aa[i] = a[i] * a[i];
        bb[i] = b[i] * b[i];
        ab[i] = a[i] * b[i];
    }
    const auto mu_a = detail::filter_valid(a, width, height, taps);
    const auto mu_b = detail::filter_valid(b, width, height, taps);
    const auto e_aa = detail::filter_valid(aa, width, height, taps);
    const auto e_bb = detail::filter_valid(bb, width, height, taps);
    const auto e_ab = detail::filter_valid(ab, width, height, taps);

    const double c1 = (params.k1 * params.dynamic_range) * (params.k1 * params.dynamic_range);
    const double c2 = (params.k2 * params.dynamic_range) * (params.k2 * params.dynamic_range);
    double total = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double ma = mu_a[i], mb = mu_b[i];
        const double va = e_aa[i] - ma * ma;
        const double vb = e_bb[i] - mb * mb;
        const double cov = e_ab[i] - ma * mb;
        total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    return total / static_cast<double>(mu_a.size());
}

inline double ssim(const ImageBuffer& clean, const ImageBuffer& degraded, const SsimParams& params = {}) {
    if (!clean.same_shape(degraded)) throw ShapeError("SSIM inputs differ in dimensions");
    const auto a = luma_plane(clean);
    const auto b = luma_plane(degraded);
    return ssim_planes(a, b, clean.width(), clean.height(), params);
}

}  // namespace occlusion
