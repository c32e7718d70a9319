#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace lilbound {

/// Two-sided standard normal quantile at 99% confidence.
inline constexpr double kZ99 = 2.5758293035489004;

struct Interval {
    double low = 0.0;
    double high = 1.0;
};

/// Wilson score interval for k successes in n trials.
Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z = kZ99);

/// Linear-interpolated quantile (type 7) of unsorted data, q in [0, 1].
double quantile(std::vector<double> data, double q);

}  // namespace lilbound
