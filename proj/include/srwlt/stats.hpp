#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace srwlt::stats {

/// Binomial proportion with its plug-in standard error sqrt(p(1-p)/n).
struct Proportion {
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;
    double p() const noexcept;
    double stderr_() const noexcept;
};

/// Sample mean with standard error from integer running sums. Sums are
/// integers so aggregation across replicas is order-independent.
struct IntegerMoments {
    std::uint64_t n = 0;
    long double sum = 0;
    long double sum_sq = 0;

    void add(std::int64_t x) noexcept {
        ++n;
        sum += static_cast<long double>(x);
        sum_sq += static_cast<long double>(x) * static_cast<long double>(x);
    }
    double mean() const noexcept;
    double stderr_() const noexcept;
};

/// |observed - expected| / stderr, the number of standard errors apart.
double z_score(double observed, double expected, double stderr_value) noexcept;

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    std::size_t bins_used = 0;
};

/// Goodness of fit of counts[i] against probabilities[i]. Bins are pooled
/// from the high end until every pooled bin expects at least min_expected
/// observations; probabilities need not sum to 1 (the remainder is the last
/// bin's complement, passed explicitly as tail_count / tail_probability).
ChiSquareResult chi_square_gof(std::span<const std::uint64_t> counts, std::span<const double> probabilities,
                               std::uint64_t tail_count, double tail_probability, double min_expected = 5.0);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// Two-sample Kolmogorov-Smirnov with the asymptotic Kolmogorov tail. For
/// discrete samples the test is conservative.
KsResult ks_two_sample(std::vector<std::int64_t> a, std::vector<std::int64_t> b);

/// Kolmogorov survival function Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_q(double lambda) noexcept;

/// Type-7 quantile of finite values; right-censored entries (+inf) sort last.
/// Returns +inf when the quantile falls among censored entries.
double quantile(std::vector<double> values, double q);

} // namespace srwlt::stats
