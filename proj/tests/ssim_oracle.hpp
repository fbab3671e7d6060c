#pragma once

#include <cmath>
#include <vector>

#include "occlusion/camera/image.hpp"

namespace occlusion::testing {

// Direct windowed SSIM: for every valid 11x11 window, weighted moments by
// explicit summation, then the two-factor SSIM expression.
inline double reference_ssim(const ImageBuffer& a, const ImageBuffer& b) {
    const int r = 5;
    double g[11], gs = 0;
    for (int i = -r; i <= r; ++i) gs += g[i + r] = std::exp(-(i * i) / (2 * 1.5 * 1.5));
    for (double& v : g) v /= gs;
    const double c1 = (0.01 * 255) * (0.01 * 255), c2 = (0.03 * 255) * (0.03 * 255);
    auto y = [](const ImageBuffer& im, int x, int yy) {
        return 0.299 * im.at(x, yy, 0) + 0.587 * im.at(x, yy, 1) + 0.114 * im.at(x, yy, 2);
    };
    double total = 0;
    long count = 0;
    for (int cy = r; cy < a.height() - r; ++cy)
        for (int cx = r; cx < a.width() - r; ++cx) {
            double mx = 0, my = 0, sxx = 0, syy = 0, sxy = 0;
            for (int v = -r; v <= r; ++v)
                for (int u = -r; u <= r; ++u) {
                    const double w = g[u + r] * g[v + r];
                    const double p = y(a, cx + u, cy + v), q = y(b, cx + u, cy + v);
                    mx += w * p;
                    my += w * q;
                    sxx += w * p * p;
                    syy += w * q * q;
                    sxy += w * p * q;
                }
            const double vx = sxx - mx * mx, vy = syy - my * my, cov = sxy - mx * my;
            total += ((2 * mx * my + c1) * (2 * cov + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
            ++count;
        }
    return total / static_cast<double>(count);
}

}  // namespace occlusion::testing
