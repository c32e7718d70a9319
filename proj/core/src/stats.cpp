#include "lilbound/stats.hpp"

#include <algorithm>
#include <cmath>

#include "lilbound/errors.hpp"

namespace lilbound {

Interval wilson_interval(std::uint64_t k, std::uint64_t n, double z) {
    if (n == 0) throw DomainError("Wilson interval needs n > 0");
    if (k > n) throw DomainError("Wilson interval needs k <= n");
    const double nn = static_cast<double>(n);
    const double p = static_cast<double>(k) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double centre = (p + z2 / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
    Interval out{std::max(0.0, centre - half), std::min(1.0, centre + half)};
    // Rounding can push the bounds past the point estimate at k = 0 or k = n.
    out.low = std::min(out.low, p);
    out.high = std::max(out.high, p);
    return out;
}

double quantile(std::vector<double> data, double q) {
    if (data.empty()) throw DomainError("quantile of empty data");
    if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
    std::sort(data.begin(), data.end());
    const double pos = q * static_cast<double>(data.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, data.size() - 1);
    return data[lo] + (pos - static_cast<double>(lo)) * (data[hi] - data[lo]);
}

}  // namespace lilbound
