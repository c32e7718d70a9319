#include "support.hpp"

#include <algorithm>
#include <cmath>

namespace lilbound::testing {

double Gen::log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }

std::vector<double> Gen::sorted_uniforms(std::size_t n, double lo, double hi) {
    std::vector<double> out(n);
    for (auto& x : out) x = uniform(lo, hi);
    std::sort(out.begin(), out.end());
    return out;
}

void for_all(int cases, std::uint64_t seed, const std::function<void(Gen&, int)>& check) {
    for (int i = 0; i < cases; ++i) {
        Gen gen(seed * 1000003ULL + static_cast<std::uint64_t>(i));
        check(gen, i);
    }
}

}  // namespace lilbound::testing
