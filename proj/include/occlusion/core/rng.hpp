#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

#include "occlusion/core/hash.hpp"

namespace occlusion {

namespace detail {
__extension__ using u128 = unsigned __int128;
}  // namespace detail

// Deterministic pseudo-random stream. The engine is std::mt19937_64, whose
// output sequence is fixed by the standard; every derived draw below is
// implemented here rather than with <random> distributions, which differ
// between standard libraries.
//
// Streams are single-owner. Concurrent work gets its own stream through
// child(), never by sharing one instance.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    // Child stream keyed by label. Depends only on (seed, label), not on how
    // many draws the parent has made.
    RngStream child(std::string_view label) const { return RngStream(derive_seed(seed_, label)); }

    std::uint64_t next_u64() { return engine_(); }

    // Uniform in [0, 1) with 53 bits of resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Unbiased integer in [0, n) via Lemire's multiply-and-reject.
    std::uint64_t uniform_index(std::uint64_t n) {
        if (n == 0) return 0;
        detail::u128 m = static_cast<detail::u128>(engine_()) * n;
        auto low = static_cast<std::uint64_t>(m);
        if (low < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (low < threshold) {
                m = static_cast<detail::u128>(engine_()) * n;
                low = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal, Marsaglia polar method. The spare deviate is cached,
    // so draws come in pairs from one accepted (u, v).
    double normal() {
        if (spare_) {
            double s = *spare_;
            spare_.reset();
            return s;
        }
        double u = 0.0, v = 0.0, s = 0.0;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        return u * factor;
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
    std::optional<double> spare_;
};

}  // namespace occlusion
