#pragma once

#include <cstdint>
#include <span>
#include <string_view>

namespace occlusion {

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

constexpr std::uint64_t fnv1a64(std::span<const std::byte> bytes,
                                std::uint64_t state = kFnvOffsetBasis) noexcept {
    for (std::byte b : bytes) {
        state ^= static_cast<std::uint64_t>(b);
        state *= kFnvPrime;
    }
    return state;
}

constexpr std::uint64_t fnv1a64(std::string_view text,
                                std::uint64_t state = kFnvOffsetBasis) noexcept {
    for (char c : text) {
        state ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        state *= kFnvPrime;
    }
    return state;
}

// splitmix64 finalizer; full avalanche over the FNV state.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Stable per-file seed: FNV-1a over the little-endian seed bytes followed by
// the path bytes, then mix64. Pure function of its inputs, so results never
// depend on the order in which files are visited.
constexpr std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view relpath) noexcept {
    std::uint64_t state = kFnvOffsetBasis;
    for (int i = 0; i < 8; ++i) {
        state ^= (global_seed >> (8 * i)) & 0xffU;
        state *= kFnvPrime;
    }
    return mix64(fnv1a64(relpath, state));
}

// 64-bit content checksum used in manifests.
inline std::uint64_t content_checksum(std::span<const std::byte> bytes) noexcept {
    return fnv1a64(bytes);
}

}  // namespace occlusion
