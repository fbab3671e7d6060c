#pragma once

#include <cmath>
#include <cstring>
#include <string>

#include "occlusion/error.hpp"
#include "occlusion/pointcloud/occlusion.hpp"
#include "occlusion/pointcloud/point_cloud.hpp"

namespace occlusion {

struct RetentionCheck {
    bool passed = false;
    std::size_t original = 0;
    std::size_t expected = 0;
    std::size_t actual = 0;
    bool subsequence = false;
    std::string reason;
};

// True iff every record of `degraded` appears in `original`, byte-exact and
// in the same relative order.
inline bool is_record_subsequence(const PointCloud& original, const PointCloud& degraded) {
    const std::size_t rs = original.record_size();
    std::size_t j = 0;
    for (std::size_t i = 0; i < original.size() && j < degraded.size(); ++i) {
        if (std::memcmp(original.record(i).data(), degraded.record(j).data(), rs) == 0) ++j;
    }
    return j == degraded.size();
}

inline RetentionCheck verify_retention(const PointCloud& original, const PointCloud& degraded, double drop_percent) {
    if (!(original.schema() == degraded.schema())) throw InputError("retention check: schemas differ");
    RetentionCheck r;
    r.original = original.size();
    r.expected = retained_count(original.size(), drop_percent);
    r.actual = degraded.size();
    r.subsequence = is_record_subsequence(original, degraded);
    if (r.actual != r.expected) {
        r.reason = "expected " + std::to_string(r.expected) + " retained points, found " + std::to_string(r.actual);
    } else if (!r.subsequence) {
        r.reason = "retained records are not an ordered, unmodified subset of the original";
    }
    r.passed = r.reason.empty();
    return r;
}

// Running per-axis displacement moments, pooled across any number of
// cloud pairs.
class NoiseAccumulator {
public:
    // Adds one pair; returns false when non-spatial bytes differ.
    bool add(const PointCloud& original, const PointCloud& degraded) {
        if (!(original.schema() == degraded.schema())) throw InputError("noise check: schemas differ");
        if (original.size() != degraded.size())
            throw InputError("noise check: point counts differ (" + std::to_string(original.size()) + " vs " +
                             std::to_string(degraded.size()) + ")");
        const std::size_t rs = original.record_size();
        bool identical = true;
        for (std::size_t i = 0; i < original.size(); ++i) {
            const auto a = original.record(i);
            const auto b = degraded.record(i);
            for (std::size_t off = 0; off < rs; ++off) {
                if (a[off] != b[off] && !is_spatial_byte(original, off)) identical = false;
            }
            for (int axis = 0; axis < 3; ++axis) {
                const double d = degraded.coord(i, axis) - original.coord(i, axis);
                sum_[axis] += d;
                sum_sq_[axis] += d * d;
            }
        }
        n_ += original.size();
        non_spatial_identical_ = non_spatial_identical_ && identical;
        return identical;
    }

    std::size_t count() const noexcept { return n_; }
    bool non_spatial_identical() const noexcept { return non_spatial_identical_; }
    double mean(int axis) const noexcept { return n_ ? sum_[axis] / static_cast<double>(n_) : 0.0; }
    // Sample standard deviation (n - 1 denominator).
    double stddev(int axis) const noexcept {
        if (n_ < 2) return 0.0;
        const double m = mean(axis);
        const double var = (sum_sq_[axis] - static_cast<double>(n_) * m * m) / static_cast<double>(n_ - 1);
        return var > 0.0 ? std::sqrt(var) : 0.0;
    }

private:
    static bool is_spatial_byte(const PointCloud& c, std::size_t off) noexcept {
        for (int axis = 0; axis < 3; ++axis)
            if (off >= c.axis_offset(axis) && off < c.axis_offset(axis) + c.axis_width(axis)) return true;
        return false;
    }

    std::size_t n_ = 0;
    double sum_[3] = {0, 0, 0};
    double sum_sq_[3] = {0, 0, 0};
    bool non_spatial_identical_ = true;
};

inline constexpr double kNoiseStdTolerance = 0.05;   // relative
inline constexpr double kNoiseMeanStdErrors = 4.0;   // mean bound in standard errors

struct NoiseCheck {
    bool passed = false;
    std::size_t count = 0;
    double sigma = 0.0;
    double mean[3] = {0, 0, 0};
    double stddev[3] = {0, 0, 0};
    bool non_spatial_identical = false;
    std::string reason;
};

// Per-axis displacement std within 5% of sigma, mean within 4 sigma / sqrt(N),
// non-spatial bytes untouched. sigma = 0 requires zero displacement.
inline NoiseCheck evaluate_noise(const NoiseAccumulator& acc, double sigma) {
    if (!(sigma >= 0.0)) throw ParameterError("noise sigma must be >= 0");
    NoiseCheck r;
    r.count = acc.count();
    r.sigma = sigma;
    r.non_spatial_identical = acc.non_spatial_identical();
    static constexpr const char* names[3] = {"x", "y", "z"};
    for (int axis = 0; axis < 3; ++axis) {
        r.mean[axis] = acc.mean(axis);
        r.stddev[axis] = acc.stddev(axis);
    }
    if (!r.non_spatial_identical) {
        r.reason = "non-spatial bytes changed";
    } else if (r.count > 0) {
        const double mean_bound = kNoiseMeanStdErrors * sigma / std::sqrt(static_cast<double>(r.count));
        for (int axis = 0; axis < 3 && r.reason.empty(); ++axis) {
            if (std::abs(r.stddev[axis] - sigma) > kNoiseStdTolerance * sigma)
                r.reason = std::string(names[axis]) + " displacement std " + std::to_string(r.stddev[axis]) +
                           " outside 5% of sigma " + std::to_string(sigma);
            else if (std::abs(r.mean[axis]) > mean_bound)
                r.reason = std::string(names[axis]) + " displacement mean " + std::to_string(r.mean[axis]) +
                           " exceeds bound " + std::to_string(mean_bound);
        }
    }
    r.passed = r.reason.empty();
    return r;
}

inline NoiseCheck verify_noise_stats(const PointCloud& original, const PointCloud& degraded, double sigma) {
    NoiseAccumulator acc;
    acc.add(original, degraded);
    return evaluate_noise(acc, sigma);
}

}  // namespace occlusion
