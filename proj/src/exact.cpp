#include "srwlt/exact.hpp"

#include "srwlt/error.hpp"

#include <cmath>
#include <string>

namespace srwlt::exact {

namespace {

struct Enumerator {
    int n;
    std::vector<std::uint32_t> counts;
    std::vector<std::uint64_t> hist;
    std::vector<std::uint64_t> totals;

    explicit Enumerator(int n_)
        : n(n_), counts(static_cast<std::size_t>(2 * n_ + 1), 0), hist(static_cast<std::size_t>(n_ + 2), 0),
          totals(static_cast<std::size_t>(n_ + 2), 0) {}

    void visit(int site) {
        auto& c = counts[static_cast<std::size_t>(site + n)];
        if (c != 0) --hist[c];
        ++c;
        ++hist[c];
    }

    void unvisit(int site) {
        auto& c = counts[static_cast<std::size_t>(site + n)];
        --hist[c];
        --c;
        if (c != 0) ++hist[c];
    }

    void run(int depth, int pos) {
        if (depth == n) {
            for (std::size_t k = 1; k < hist.size(); ++k) totals[k] += hist[k];
            return;
        }
        for (int d : {-1, 1}) {
            visit(pos + d);
            run(depth + 1, pos + d);
            unvisit(pos + d);
        }
    }
};

void check_moment_args(std::int64_t s, std::int64_t k) {
    if (s < 2) throw DomainError("binomial moment: s must be at least 2, got " + std::to_string(s));
    if (k < 1 || k > s - 1) {
        throw DomainError("binomial moment: k must lie in [1, s-1], got k = " + std::to_string(k));
    }
}

// Neumaier-compensated running sum.
struct CompensatedSum {
    double sum = 0.0;
    double comp = 0.0;
    void add(double x) {
        const double t = sum + x;
        if (std::fabs(sum) >= std::fabs(x)) {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + comp; }
};

Rational pow2_inverse(std::int64_t k) {
    return Rational(1, BigInt(1) << static_cast<unsigned>(k));
}

void compositions(std::int64_t remaining_parts, std::int64_t budget, const Rational& acc, Rational& out) {
    if (remaining_parts == 0) {
        out += acc;
        return;
    }
    for (std::int64_t a = 1; a <= budget - (remaining_parts - 1); ++a) {
        compositions(remaining_parts - 1, budget - a, acc / a, out);
    }
}

} // namespace

EnumerationTable enumerate_srw(int n) {
    if (n < 1) throw DomainError("enumerate_srw: n must be at least 1");
    if (n > kEnumerateMaxN) {
        throw ResourceCapError("enumerate_srw: n = " + std::to_string(n) + " exceeds the cap of " +
                               std::to_string(kEnumerateMaxN) + " (2^n paths are enumerated)");
    }
    Enumerator e(n);
    e.visit(0);
    e.run(0, 0);
    EnumerationTable table;
    table.n = n;
    table.expectation.resize(static_cast<std::size_t>(n + 2));
    const BigInt paths = BigInt(1) << n;
    for (std::size_t k = 0; k < e.totals.size(); ++k) {
        table.expectation[k] = ExactValue(Rational(BigInt(e.totals[k]), paths));
    }
    return table;
}

ExactValue height_pmf(std::int64_t k) {
    if (k < 1) throw DomainError("height_pmf: k must be at least 1");
    return ExactValue(Rational(BigInt(1), BigInt(k) * (k + 1)));
}

ExactValue height_ccdf(std::int64_t k) {
    if (k < 1) throw DomainError("height_ccdf: k must be at least 1");
    return ExactValue(Rational(1, k));
}

ExactValue stay_above_probability(std::int64_t a, std::int64_t b) {
    if (a < 1) throw DomainError("stay_above_probability: a must be at least 1");
    if (a >= b) throw DomainError("stay_above_probability: requires a < b");
    return ExactValue(Rational(BigInt(b), BigInt(2) * a * (b - a)));
}

HittingResult chain_hitting_solve(const WalkLaw& law, std::int64_t floor, std::int64_t ceiling, std::int64_t start,
                                  std::int64_t target) {
    if (floor > ceiling) throw DomainError("chain_hitting_solve: floor > ceiling");
    if (start < floor || start > ceiling) throw DomainError("chain_hitting_solve: start outside [floor, ceiling]");
    if (target != floor && target != ceiling) throw DomainError("chain_hitting_solve: target must be floor or ceiling");
    for (std::int64_t x = floor + 1; x < ceiling; ++x) {
        if (!law.in_domain(x)) {
            throw DomainError("chain_hitting_solve: interior state " + std::to_string(x) + " outside domain of " +
                              law.name());
        }
    }
    if (start == target) return {1.0, ExactValue(Rational(1))};
    if (start == floor || start == ceiling) return {0.0, ExactValue(Rational(0))};

    const std::int64_t interior = ceiling - floor - 1;
    const bool exact_path = interior <= kExactHittingStates;

    // h_i = c_i h_{i+1} + d_i for interior i = 1..m; h_0, h_{m+1} are the boundary values
    if (exact_path) {
        const Rational h_lo = target == floor ? 1 : 0;
        const Rational h_hi = target == ceiling ? 1 : 0;
        std::vector<Rational> c(static_cast<std::size_t>(interior + 1));
        std::vector<Rational> d(static_cast<std::size_t>(interior + 1));
        c[0] = 0;
        d[0] = h_lo;
        for (std::int64_t i = 1; i <= interior; ++i) {
            const auto p = step_probabilities_exact(law, floor + i);
            const Rational denom = 1 - p.p_down * c[static_cast<std::size_t>(i - 1)];
            if (denom == 0) throw std::logic_error("chain_hitting_solve: singular system");
            c[static_cast<std::size_t>(i)] = p.p_up / denom;
            d[static_cast<std::size_t>(i)] = p.p_down * d[static_cast<std::size_t>(i - 1)] / denom;
        }
        Rational h = h_hi;
        for (std::int64_t i = interior; i >= start - floor; --i) {
            h = c[static_cast<std::size_t>(i)] * h + d[static_cast<std::size_t>(i)];
        }
        ExactValue ev(h);
        return {ev.value(), ev};
    }

    const double h_lo = target == floor ? 1.0 : 0.0;
    const double h_hi = target == ceiling ? 1.0 : 0.0;
    std::vector<double> c(static_cast<std::size_t>(interior + 1));
    std::vector<double> d(static_cast<std::size_t>(interior + 1));
    c[0] = 0.0;
    d[0] = h_lo;
    for (std::int64_t i = 1; i <= interior; ++i) {
        const auto p = step_probabilities(law, floor + i);
        const double denom = 1.0 - p.p_down * c[static_cast<std::size_t>(i - 1)];
        if (denom == 0.0) throw std::logic_error("chain_hitting_solve: singular system");
        c[static_cast<std::size_t>(i)] = p.p_up / denom;
        d[static_cast<std::size_t>(i)] = p.p_down * d[static_cast<std::size_t>(i - 1)] / denom;
    }
    double h = h_hi;
    for (std::int64_t i = interior; i >= start - floor; --i) {
        h = c[static_cast<std::size_t>(i)] * h + d[static_cast<std::size_t>(i)];
    }
    return {h, std::nullopt};
}

MomentEntry binomial_moment_dp(std::int64_t s, std::int64_t k, bool restricted) {
    check_moment_args(s, k);
    if (s > kMomentMaxS) {
        throw ResourceCapError("binomial_moment_dp: s = " + std::to_string(s) + " exceeds the cap of " +
                               std::to_string(kMomentMaxS));
    }
    const std::int64_t limit = restricted ? s / 2 : s - 1;
    MomentEntry out{s, k, restricted, 0.0};
    if (k > limit) return out;

    const auto len = static_cast<std::size_t>(limit + 1);
    std::vector<double> kernel(len, 0.0);
    for (std::int64_t a = 1; a <= limit; ++a) kernel[static_cast<std::size_t>(a)] = 1.0 / static_cast<double>(a);

    // F_j(m) = sum over compositions of m into j positive parts of 1/(a_1...a_j)
    std::vector<double> f = kernel;
    std::vector<double> next(len, 0.0);
    for (std::int64_t j = 2; j <= k; ++j) {
        std::fill(next.begin(), next.end(), 0.0);
        for (std::int64_t m = j; m <= limit; ++m) {
            CompensatedSum acc;
            for (std::int64_t a = 1; a <= m - (j - 1); ++a) {
                acc.add(f[static_cast<std::size_t>(m - a)] * kernel[static_cast<std::size_t>(a)]);
            }
            next[static_cast<std::size_t>(m)] = acc.value();
        }
        f.swap(next);
    }
    CompensatedSum total;
    for (std::int64_t m = k; m <= limit; ++m) total.add(f[static_cast<std::size_t>(m)]);

    double factor = std::ldexp(1.0, static_cast<int>(-k));
    if (!restricted) factor *= static_cast<double>(k + 1);
    out.value = factor * total.value();
    return out;
}

ExactValue binomial_moment_exact(std::int64_t s, std::int64_t k, bool restricted) {
    check_moment_args(s, k);
    if (s > kExactMomentMaxS) {
        throw ResourceCapError("binomial_moment_exact: s = " + std::to_string(s) + " exceeds the cap of " +
                               std::to_string(kExactMomentMaxS));
    }
    const std::int64_t limit = restricted ? s / 2 : s - 1;
    if (k > limit) return ExactValue(Rational(0));
    const auto len = static_cast<std::size_t>(limit + 1);
    std::vector<Rational> f(len, Rational(0));
    for (std::int64_t a = 1; a <= limit; ++a) f[static_cast<std::size_t>(a)] = Rational(1, a);
    for (std::int64_t j = 2; j <= k; ++j) {
        std::vector<Rational> next(len, Rational(0));
        for (std::int64_t m = j; m <= limit; ++m) {
            Rational acc = 0;
            for (std::int64_t a = 1; a <= m - (j - 1); ++a) acc += f[static_cast<std::size_t>(m - a)] / a;
            next[static_cast<std::size_t>(m)] = acc;
        }
        f.swap(next);
    }
    Rational total = 0;
    for (std::int64_t m = k; m <= limit; ++m) total += f[static_cast<std::size_t>(m)];
    Rational factor = pow2_inverse(k);
    if (!restricted) factor *= (k + 1);
    return ExactValue(factor * total);
}

double binomial_moment_of_g(std::int64_t s, std::int64_t k) {
    if (s < 2) throw DomainError("binomial_moment_of_g: s must be at least 2");
    if (k < 1) throw DomainError("binomial_moment_of_g: k must be at least 1");
    const double upper = k <= s - 1 ? binomial_moment_dp(s, k, false).value : 0.0;
    const double lower = k == 1 ? 1.0 : (k - 1 <= s - 1 ? binomial_moment_dp(s, k - 1, false).value : 0.0);
    return upper + lower;
}

ExactValue composition_sum_bruteforce(std::int64_t s, std::int64_t k, bool restricted) {
    check_moment_args(s, k);
    if (s > 14 || k > 5) throw ResourceCapError("composition_sum_bruteforce: limited to s <= 14, k <= 5");
    const std::int64_t limit = restricted ? s / 2 : s - 1;
    Rational sum = 0;
    compositions(k, limit, Rational(1), sum);
    Rational factor = pow2_inverse(k);
    if (!restricted) factor *= (k + 1);
    return ExactValue(factor * sum);
}

double normalized_moment_deviation(std::int64_t s, std::int64_t k) {
    const double m = binomial_moment_dp(s, k, false).value;
    return std::pow(m, 1.0 / static_cast<double>(k)) / (std::log(static_cast<double>(s)) / 2.0) - 1.0;
}

ConvolvedPmf convolve_height_pmf(std::int64_t j, std::int64_t cap) {
    if (j < 1) throw DomainError("convolve_height_pmf: j must be at least 1");
    if (cap < j) throw DomainError("convolve_height_pmf: cap must be at least j");
    if (cap > kConvolveMaxCap) {
        throw ResourceCapError("convolve_height_pmf: cap = " + std::to_string(cap) + " exceeds the cap of " +
                               std::to_string(kConvolveMaxCap));
    }
    const auto len = static_cast<std::size_t>(cap + 1);
    std::vector<Rational> base(len, Rational(0));
    for (std::int64_t k = 1; k <= cap; ++k) base[static_cast<std::size_t>(k)] = Rational(BigInt(1), BigInt(k) * (k + 1));
    std::vector<Rational> cur = base;
    for (std::int64_t step = 2; step <= j; ++step) {
        std::vector<Rational> next(len, Rational(0));
        for (std::int64_t m = step; m <= cap; ++m) {
            Rational acc = 0;
            for (std::int64_t a = 1; a <= m - (step - 1); ++a) {
                acc += cur[static_cast<std::size_t>(m - a)] * base[static_cast<std::size_t>(a)];
            }
            next[static_cast<std::size_t>(m)] = acc;
        }
        cur.swap(next);
    }
    ConvolvedPmf out;
    out.j = j;
    out.cap = cap;
    Rational total = 0;
    out.pmf.reserve(len);
    for (auto& r : cur) {
        total += r;
        out.pmf.emplace_back(r);
    }
    out.tail_mass = ExactValue(Rational(1) - total);
    return out;
}

} // namespace srwlt::exact
