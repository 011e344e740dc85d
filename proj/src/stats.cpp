#include "srwlt/stats.hpp"

#include "srwlt/error.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace srwlt::stats {

double Proportion::p() const noexcept {
    return trials == 0 ? 0.0 : static_cast<double>(successes) / static_cast<double>(trials);
}

double Proportion::stderr_() const noexcept {
    if (trials == 0) return 0.0;
    const double q = p();
    return std::sqrt(q * (1.0 - q) / static_cast<double>(trials));
}

double IntegerMoments::mean() const noexcept {
    return n == 0 ? 0.0 : static_cast<double>(sum / static_cast<long double>(n));
}

double IntegerMoments::stderr_() const noexcept {
    if (n < 2) return 0.0;
    const long double nn = static_cast<long double>(n);
    const long double m = sum / nn;
    long double var = (sum_sq - nn * m * m) / (nn - 1);
    if (var < 0) var = 0;
    return static_cast<double>(std::sqrt(var / nn));
}

double z_score(double observed, double expected, double stderr_value) noexcept {
    const double diff = std::fabs(observed - expected);
    if (stderr_value <= 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / stderr_value;
}

ChiSquareResult chi_square_gof(std::span<const std::uint64_t> counts, std::span<const double> probabilities,
                               std::uint64_t tail_count, double tail_probability, double min_expected) {
    if (counts.size() != probabilities.size()) throw DomainError("chi_square_gof: size mismatch");
    std::uint64_t total = tail_count;
    for (auto c : counts) total += c;
    const auto n = static_cast<double>(total);

    std::vector<double> obs(counts.begin(), counts.end());
    std::vector<double> expv;
    expv.reserve(probabilities.size());
    for (double p : probabilities) expv.push_back(p * n);
    double tail_obs = static_cast<double>(tail_count);
    double tail_exp = tail_probability * n;

    // pool from the high end into the tail bin while it is too small
    while (!obs.empty() && (tail_exp < min_expected || expv.back() < min_expected)) {
        tail_obs += obs.back();
        tail_exp += expv.back();
        obs.pop_back();
        expv.pop_back();
    }
    ChiSquareResult out;
    if (tail_exp > 0.0) {
        obs.push_back(tail_obs);
        expv.push_back(tail_exp);
    }
    for (std::size_t i = 0; i < obs.size(); ++i) {
        if (expv[i] <= 0.0) {
            if (obs[i] > 0.0) {
                out.statistic = std::numeric_limits<double>::infinity();
                out.p_value = 0.0;
                return out;
            }
            continue;
        }
        const double d = obs[i] - expv[i];
        out.statistic += d * d / expv[i];
        ++out.bins_used;
    }
    out.dof = static_cast<int>(out.bins_used) - 1;
    if (out.dof < 1) {
        out.p_value = 1.0;
        return out;
    }
    const boost::math::chi_squared dist(out.dof);
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.statistic));
    return out;
}

double kolmogorov_q(double lambda) noexcept {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 == 1) ? term : -term;
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<std::int64_t> a, std::vector<std::int64_t> b) {
    if (a.empty() || b.empty()) throw DomainError("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const std::int64_t x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    const double sq = std::sqrt(ne);
    return {d, kolmogorov_q((sq + 0.12 + 0.11 / sq) * d)};
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw DomainError("quantile: empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = static_cast<std::size_t>(std::ceil(h));
    if (std::isinf(values[hi])) return std::numeric_limits<double>::infinity();
    return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

} // namespace srwlt::stats
