#pragma once

#include <cstdint>

namespace lilbound {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/**
 * Counter-based stream for one simulated path. The starting state is
 * mix64(seed ^ mix64(path)), then the stream is plain splitmix64, so path i
 * sees the same numbers whichever worker runs it.
 */
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t path) noexcept : state_(mix64(seed ^ mix64(path))) {}

    std::uint64_t next() noexcept {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform on (0, 1].
    double uniform() noexcept { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

}  // namespace lilbound
