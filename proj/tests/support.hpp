#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace lilbound::testing {

/// Seeded generator for property checks. Each case draws from its own
/// stream so a failure report names a reproducible case index.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double log_uniform(double lo, double hi);
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    double normal() { return std::normal_distribution<double>()(engine_); }
    int sign() { return integer(0, 1) ? 1 : -1; }
    std::vector<double> sorted_uniforms(std::size_t n, double lo, double hi);
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// Runs `check(gen, case_index)` for `cases` independent cases.
void for_all(int cases, std::uint64_t seed, const std::function<void(Gen&, int)>& check);

}  // namespace lilbound::testing
