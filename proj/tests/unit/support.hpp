#pragma once

#include "srwlt/walk.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace testing {

inline std::vector<srwlt::Site> path_from_steps(srwlt::Site start, const std::vector<int>& steps) {
    std::vector<srwlt::Site> sites{start};
    for (int s : steps) sites.push_back(sites.back() + s);
    return sites;
}

inline std::vector<srwlt::Site> random_srw_path(std::uint64_t seed, std::uint64_t stream, std::size_t n) {
    srwlt::RngStream rng(seed, stream);
    std::vector<srwlt::Site> sites{0};
    for (std::size_t t = 0; t < n; ++t) sites.push_back(sites.back() + (rng.bit() ? 1 : -1));
    return sites;
}

/// |observed - expected| in units of the binomial standard error.
inline double binomial_z(std::uint64_t hits, std::uint64_t trials, double p) {
    const double se = std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
    return std::fabs(static_cast<double>(hits) / static_cast<double>(trials) - p) / se;
}

} // namespace testing
