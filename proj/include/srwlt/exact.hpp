#pragma once

#include "srwlt/rational.hpp"
#include "srwlt/walk.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace srwlt::exact {

inline constexpr int kEnumerateMaxN = 24;

/// E[g_k(n)] for k = 1..n+1 by enumerating all 2^n sign sequences.
struct EnumerationTable {
    int n = 0;
    /// expectation[k] for k in [0, n+1]; slot 0 is E[#unvisited] = 0.
    std::vector<ExactValue> expectation;
};

/// Refuses n < 1 (DomainError) or n > 24 (ResourceCapError).
EnumerationTable enumerate_srw(int n);

/// P(X = k) = 1/(k(k+1)) for the excursion height X.
ExactValue height_pmf(std::int64_t k);
/// P(X >= k) = 1/k.
ExactValue height_ccdf(std::int64_t k);

/// Probability that the avoid-zero walk, after first hitting a, stays strictly
/// above a until it hits b: b / (2a(b-a)). Requires 1 <= a < b.
ExactValue stay_above_probability(std::int64_t a, std::int64_t b);

struct HittingResult {
    double value = 0.0;
    /// Set when the rational elimination path was used.
    std::optional<ExactValue> exact;
};

/// Probability that law, started at start, reaches target before the other
/// end of [floor, ceiling]. Solves the first-step recurrence on the interior
/// with a tridiagonal forward sweep: in exact rationals when the interior has
/// at most kExactHittingStates states, in binary64 otherwise.
inline constexpr std::int64_t kExactHittingStates = 1000;
HittingResult chain_hitting_solve(const WalkLaw& law, std::int64_t floor, std::int64_t ceiling, std::int64_t start,
                                  std::int64_t target);

/// One entry of the moment table. Unrestricted: E[binom(g(s)-1, k)] =
/// 2^-k (k+1) sum_{a_1+..+a_k <= s-1} 1/(a_1...a_k). Restricted: the lower-bound
/// sum 2^-k sum_{a_1+..+a_k <= floor(s/2)} 1/(a_1...a_k) for the once-visited
/// sites below s/2.
struct MomentEntry {
    std::int64_t s = 0;
    std::int64_t k = 0;
    bool restricted = false;
    double value = 0.0;
};

inline constexpr std::int64_t kMomentMaxS = 10000;
inline constexpr std::int64_t kExactMomentMaxS = 200;

/// O(k s^2) iterated convolution with the harmonic kernel, Neumaier-compensated.
/// Requires s >= 2 and 1 <= k <= s-1; s above kMomentMaxS is refused.
MomentEntry binomial_moment_dp(std::int64_t s, std::int64_t k, bool restricted);

/// Same quantity in exact rationals; s <= kExactMomentMaxS.
ExactValue binomial_moment_exact(std::int64_t s, std::int64_t k, bool restricted);

/// E[binom(g(s), k)] = E[binom(g(s)-1, k)] + E[binom(g(s)-1, k-1)].
double binomial_moment_of_g(std::int64_t s, std::int64_t k);

/// Direct sum over all compositions; s <= 14, k <= 5.
ExactValue composition_sum_bruteforce(std::int64_t s, std::int64_t k, bool restricted = false);

/// (E[binom(g(s)-1,k)])^(1/k) / (log(s)/2) - 1.
double normalized_moment_deviation(std::int64_t s, std::int64_t k);

/// pmf of X_1 + ... + X_j on [0, cap] (zero below j) plus the mass above cap.
struct ConvolvedPmf {
    std::int64_t j = 0;
    std::int64_t cap = 0;
    std::vector<ExactValue> pmf;
    ExactValue tail_mass;
};

inline constexpr std::int64_t kConvolveMaxCap = 500;
ConvolvedPmf convolve_height_pmf(std::int64_t j, std::int64_t cap);

} // namespace srwlt::exact
