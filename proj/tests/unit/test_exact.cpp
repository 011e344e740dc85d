#include "srwlt/exact.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <vector>

using namespace srwlt;
using namespace srwlt::exact;

namespace {

// E[g_k(n)] by direct enumeration with a map-based tally.
std::vector<Rational> enumerate_reference(int n) {
    std::vector<Rational> e(static_cast<std::size_t>(n) + 2, Rational(0));
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        std::map<std::int64_t, int> lt;
        std::int64_t pos = 0;
        ++lt[pos];
        for (int t = 0; t < n; ++t) {
            pos += (mask >> t) & 1U ? 1 : -1;
            ++lt[pos];
        }
        for (const auto& [site, c] : lt) e[static_cast<std::size_t>(c)] += 1;
    }
    for (auto& v : e) v /= Rational(BigInt(1) << n);
    return e;
}

double harmonic(std::int64_t n) {
    long double h = 0;
    for (std::int64_t i = n; i >= 1; --i) h += 1.0L / static_cast<long double>(i);
    return static_cast<double>(h);
}

} // namespace

TEST_CASE("enumeration of the first steps") {
    auto t1 = enumerate_srw(1);
    CHECK(t1.expectation[1] == ExactValue(2, 1));
    auto t2 = enumerate_srw(2);
    CHECK(t2.expectation[1] == ExactValue(2, 1));
    CHECK(t2.expectation[2] == ExactValue(1, 2));
    CHECK(t2.expectation[1].str() == "2/1");
}

TEST_CASE("enumeration agrees with an independent enumeration") {
    for (int n = 1; n <= 12; ++n) {
        auto table = enumerate_srw(n);
        auto ref = enumerate_reference(n);
        REQUIRE(table.expectation.size() == ref.size());
        for (std::size_t k = 0; k < ref.size(); ++k) CHECK(table.expectation[k].rational() == ref[k]);
    }
}

TEST_CASE("E g_1(n) = 2 exactly for every n up to 20") {
    for (int n = 1; n <= 20; ++n) CHECK(enumerate_srw(n).expectation[1] == ExactValue(2, 1));
}

TEST_CASE("enumeration caps") {
    CHECK_THROWS_AS(enumerate_srw(0), DomainError);
    CHECK_THROWS_AS(enumerate_srw(kEnumerateMaxN + 1), ResourceCapError);
}

TEST_CASE("height law") {
    CHECK(height_ccdf(1) == ExactValue(1, 1));
    CHECK(height_pmf(1) == ExactValue(1, 2));
    CHECK(height_pmf(2) == ExactValue(1, 6));
    CHECK_THROWS_AS(height_pmf(0), DomainError);
    CHECK_THROWS_AS(height_ccdf(-1), DomainError);
    // telescoping: pmf(k) = ccdf(k) - ccdf(k+1), so the partial sum to K is 1 - 1/(K+1)
    Rational partial(0);
    for (std::int64_t k = 1; k <= 2000; ++k) partial += height_pmf(k).rational();
    CHECK(partial == Rational(1) - Rational(1, 2001));
    for (std::int64_t k = 1; k <= 1000000; k += 997) {
        CHECK(height_pmf(k).rational() + height_ccdf(k + 1).rational() == height_ccdf(k).rational());
    }
    CHECK(height_ccdf(1000001) == ExactValue(1, 1000001));
}

TEST_CASE("stay-above probability") {
    CHECK(stay_above_probability(1, 2) == ExactValue(1, 1));
    CHECK(stay_above_probability(1, 3) == ExactValue(3, 4));
    CHECK(stay_above_probability(2, 4) == ExactValue(1, 2));
    CHECK_THROWS_AS(stay_above_probability(3, 3), DomainError);
    CHECK_THROWS_AS(stay_above_probability(0, 3), DomainError);
    // Doob transform of the gambler's ruin: forced-weight step to a+1, then the
    // avoid-zero walk from a+1 hits b before a with probability (b/(a+1)) / (b-a).
    for (std::int64_t a = 1; a <= 20; ++a) {
        for (std::int64_t b = a + 1; b <= 30; ++b) {
            const Rational up(a + 1, 2 * a);
            const Rational reach = Rational(b, a + 1) * Rational(1, b - a);
            CHECK(stay_above_probability(a, b).rational() == up * reach);
        }
    }
}

TEST_CASE("chain hitting solve") {
    auto srw = chain_hitting_solve(WalkLaw::simple_symmetric(), 2, 8, 4, 8);
    REQUIRE(srw.exact.has_value());
    CHECK(*srw.exact == ExactValue(1, 3));
    auto az = chain_hitting_solve(WalkLaw::avoid_zero(), 1, 3, 2, 3);
    CHECK(*az.exact == ExactValue(3, 4));
    auto ruin = chain_hitting_solve(WalkLaw::simple_symmetric(), 8, 32, 16, 32);
    CHECK(*ruin.exact == ExactValue(1, 3));
    auto low = chain_hitting_solve(WalkLaw::simple_symmetric(), 8, 32, 16, 8);
    CHECK(*low.exact == ExactValue(2, 3));
    CHECK(*chain_hitting_solve(WalkLaw::simple_symmetric(), 0, 5, 0, 5).exact == ExactValue(0, 1));
    CHECK(*chain_hitting_solve(WalkLaw::simple_symmetric(), 0, 5, 5, 5).exact == ExactValue(1, 1));

    for (std::int64_t f = -5; f <= 3; ++f) {
        for (std::int64_t c = f + 1; c <= 12; ++c) {
            for (std::int64_t s = f; s <= c; ++s) {
                auto r = chain_hitting_solve(WalkLaw::simple_symmetric(), f, c, s, c);
                CHECK(std::fabs(r.value - static_cast<double>(s - f) / static_cast<double>(c - f)) <= 1e-12);
            }
        }
    }
    // the binary64 sweep agrees with the linear harmonic function on a large chain
    auto big = chain_hitting_solve(WalkLaw::simple_symmetric(), 0, 3000, 1234, 3000);
    CHECK_FALSE(big.exact.has_value());
    CHECK(std::fabs(big.value - 1234.0 / 3000.0) <= 1e-10);
    // avoid-zero: h(x) = x transforms ruin probabilities by h(target)/h(start)
    auto cond = chain_hitting_solve(WalkLaw::avoid_zero(), 3, 40, 10, 40);
    CHECK(*cond.exact == ExactValue(Rational(40, 10) * Rational(10 - 3, 40 - 3)));
    // ceiling-stay: h(x) = c+1-x
    auto cs = chain_hitting_solve(WalkLaw::ceiling_stay(10), 0, 10, 7, 0);
    CHECK(*cs.exact == ExactValue(Rational(11, 4) * Rational(10 - 7, 10)));

    CHECK_THROWS_AS(chain_hitting_solve(WalkLaw::simple_symmetric(), 0, 5, 6, 5), DomainError);
    CHECK_THROWS_AS(chain_hitting_solve(WalkLaw::simple_symmetric(), 0, 5, 2, 3), DomainError);
    CHECK_THROWS_AS(chain_hitting_solve(WalkLaw::avoid_zero(), -1, 5, 2, 5), DomainError);
}

TEST_CASE("binomial moment table") {
    CHECK(binomial_moment_dp(2, 1, false).value == 1.0);
    CHECK(binomial_moment_of_g(2, 1) == 2.0);
    CHECK(binomial_moment_dp(3, 1, false).value == 1.5);
    CHECK(binomial_moment_of_g(3, 1) == 2.5);
    for (std::int64_t s : {10, 100, 1000}) {
        CHECK(std::fabs(binomial_moment_dp(s, 1, false).value / harmonic(s - 1) - 1.0) <= 1e-13);
    }
    // frozen from an independent float64 convolution
    CHECK(binomial_moment_dp(100, 5, false).value == doctest::Approx(397.61244535741525).epsilon(1e-12));
    CHECK(binomial_moment_dp(1000, 7, false).value == doctest::Approx(48553.325578532807).epsilon(1e-12));
    CHECK(binomial_moment_dp(10000, 10, false).value == doctest::Approx(46618379.240802571).epsilon(1e-12));
    CHECK(normalized_moment_deviation(100, 5) == doctest::Approx(0.43772659108865675).epsilon(1e-12));

    CHECK_THROWS_AS(binomial_moment_dp(1, 1, false), DomainError);
    CHECK_THROWS_AS(binomial_moment_dp(10, 10, false), DomainError);
    CHECK_THROWS_AS(binomial_moment_dp(kMomentMaxS + 1, 2, false), ResourceCapError);
    CHECK_THROWS_AS(binomial_moment_exact(kExactMomentMaxS + 1, 2, false), ResourceCapError);
}

TEST_CASE("moment values are positive") {
    for (std::int64_t s = 2; s <= 60; ++s) {
        for (std::int64_t k = 1; k <= s - 1; ++k) {
            CHECK(binomial_moment_dp(s, k, false).value > 0.0);
            if (k <= s / 2) CHECK(binomial_moment_dp(s, k, true).value > 0.0);
        }
    }
}

TEST_CASE("composition sums") {
    CHECK(composition_sum_bruteforce(4, 2) == ExactValue(3, 2));
    CHECK(composition_sum_bruteforce(2, 1) == ExactValue(1, 1));
    CHECK(composition_sum_bruteforce(3, 2) == ExactValue(3, 4));
    for (std::int64_t s = 2; s <= 14; ++s) {
        for (std::int64_t k = 1; k <= std::min<std::int64_t>(5, s - 1); ++k) {
            for (bool restricted : {false, true}) {
                const auto brute = composition_sum_bruteforce(s, k, restricted);
                const auto dp = binomial_moment_dp(s, k, restricted).value;
                CHECK(std::fabs(dp - brute.value()) <= 1e-12 * brute.value());
                CHECK(binomial_moment_exact(s, k, restricted) == brute);
            }
        }
    }
}

TEST_CASE("exact and binary64 moment tables agree") {
    for (std::int64_t s : {20, 50, 200}) {
        for (std::int64_t k : {1, 2, 4, 8}) {
            const double exact_v = binomial_moment_exact(s, k, false).value();
            CHECK(std::fabs(binomial_moment_dp(s, k, false).value - exact_v) <= 1e-12 * exact_v);
        }
    }
}

TEST_CASE("convolution of the height law") {
    auto one = convolve_height_pmf(1, 30);
    for (std::int64_t k = 1; k <= 30; ++k) CHECK(one.pmf[static_cast<std::size_t>(k)] == height_pmf(k));
    CHECK(one.tail_mass == ExactValue(1, 31));

    auto two = convolve_height_pmf(2, 40);
    CHECK(two.pmf[2] == ExactValue(1, 4));
    CHECK(two.pmf[3] == ExactValue(1, 6));
    CHECK(two.pmf[1] == ExactValue(0, 1));
    for (std::int64_t j : {2, 3, 5}) {
        auto c = convolve_height_pmf(j, 60);
        Rational total = c.tail_mass.rational();
        for (const auto& v : c.pmf) total += v.rational();
        CHECK(total == Rational(1));
    }
    CHECK_THROWS_AS(convolve_height_pmf(3, 2), DomainError);
    CHECK_THROWS_AS(convolve_height_pmf(2, kConvolveMaxCap + 1), ResourceCapError);
}

TEST_CASE("exact values are reduced and shadowed to within one ulp") {
    ExactValue v(6, -4);
    CHECK(v.str() == "-3/2");
    CHECK(v.denominator() > 0);
    for (std::int64_t p = 1; p < 400; p += 7) {
        for (std::int64_t q = 1; q < 400; q += 11) {
            ExactValue e(p, q);
            const long double ref = static_cast<long double>(p) / static_cast<long double>(q);
            CHECK(std::fabs(static_cast<long double>(e.value()) - ref) <=
                  std::fabs(std::nextafter(e.value(), 1e300) - e.value()));
        }
    }
}
