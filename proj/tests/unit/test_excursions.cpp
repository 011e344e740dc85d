#include "support.hpp"

#include "srwlt/excursions.hpp"
#include "srwlt/exact.hpp"
#include "srwlt/stats.hpp"

#include <doctest.h>

#include <algorithm>
#include <limits>
#include <map>
#include <vector>

using namespace srwlt;

namespace {

// Forgets to move a site out of the once-visited slot on its second visit.
class FaultyTally : public VisitTally {
public:
    void record_step(Site site) {
        VisitTally::record_step(site);
        if (count(site) == 2) move_multiplicity(2, 1);
    }
};

// Literal reading of the stopping-time definitions, independent of decompose().
struct RefFrame {
    std::uint64_t tau;
    std::optional<std::uint64_t> sigma;
};

std::vector<RefFrame> reference_frames(const std::vector<Site>& s) {
    std::vector<RefFrame> out;
    auto range_upto = [&](std::uint64_t t) {
        auto [lo, hi] = std::minmax_element(s.begin(), s.begin() + static_cast<std::ptrdiff_t>(t) + 1);
        return std::pair<Site, Site>{*lo, *hi};
    };
    std::uint64_t t = 0;
    while (true) {
        // tau: first k > t outside the range at t
        auto [n0, m0] = range_upto(t);
        std::uint64_t tau = t + 1;
        while (tau < s.size() && s[tau] >= n0 && s[tau] <= m0) ++tau;
        if (tau >= s.size()) break;
        auto [n1, m1] = range_upto(tau - 1);
        std::uint64_t sigma = tau + 1;
        while (sigma < s.size() && (s[sigma] < n1 || s[sigma] > m1)) ++sigma;
        if (sigma >= s.size()) {
            out.push_back({tau, std::nullopt});
            break;
        }
        out.push_back({tau, sigma});
        t = sigma;
    }
    return out;
}

} // namespace

TEST_CASE("decompose hand-checked paths") {
    auto f = decompose(std::vector<Site>{0, 1, 2, 1, 0, -1, 0});
    REQUIRE(f.size() == 2);
    CHECK(f[0].tau == 1);
    CHECK(f[0].sigma == std::uint64_t{4});
    CHECK(f[0].next_tau == std::uint64_t{5});
    CHECK(f[1].tau == 5);
    CHECK(f[1].sigma == std::uint64_t{6});
    CHECK(f[0].height_gain == 2);
    CHECK(f[1].height_gain == 1);
    CHECK_FALSE(f[1].censored);

    auto g = decompose(std::vector<Site>{0, 1, 0});
    REQUIRE(g.size() == 1);
    CHECK(g[0].tau == 1);
    CHECK(g[0].sigma == std::uint64_t{2});
    CHECK(g[0].once_max == 1);

    auto open = decompose(std::vector<Site>{0, 1, 2});
    REQUIRE(open.size() == 1);
    CHECK(open[0].censored);
    CHECK_FALSE(open[0].sigma.has_value());

    CHECK_THROWS_AS(decompose(std::vector<Site>{1, 2}), DomainError);
}

TEST_CASE("decompose matches the literal definitions and its invariants") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto s = testing::random_srw_path(seed, 11, 20000);
        auto frames = decompose(s);
        auto ref = reference_frames(s);
        REQUIRE(frames.size() == ref.size());
        for (std::size_t i = 0; i < frames.size(); ++i) {
            const auto& f = frames[i];
            CHECK(f.tau == ref[i].tau);
            CHECK(f.sigma == ref[i].sigma);
            CHECK_FALSE(f.sigma_mismatch);
            CHECK(f.anchor == s[f.tau - 1]);
            if (i == 0) CHECK(f.tau == 1);
            if (f.sigma) {
                CHECK(f.tau <= *f.sigma);
                CHECK(s[*f.sigma] == f.anchor);
                CHECK(f.height_gain >= 1);
                // D is bounded by the excursion's own reach from its anchor
                Site reach = 0;
                for (std::uint64_t t = f.tau; t < *f.sigma; ++t) reach = std::max(reach, std::abs(s[t] - f.anchor));
                CHECK(f.once_max >= 1);
                CHECK(f.once_max <= reach);
                CHECK(f.once_max == excursion_once_max(std::vector<Site>(
                                        s.begin() + static_cast<std::ptrdiff_t>(f.tau),
                                        s.begin() + static_cast<std::ptrdiff_t>(*f.sigma) + 1)) );
            }
            if (i + 1 < frames.size()) {
                CHECK(f.next_tau == frames[i + 1].tau);
                CHECK(*f.sigma < frames[i + 1].tau);
            }
        }
    }
}

TEST_CASE("online decomposition matches the offline one") {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto s = testing::random_srw_path(seed, 12, 20000);
        auto offline = decompose(s);
        OnlineDecomposer online;
        for (Site x : s) online.push(x);
        auto streamed = online.finish();
        REQUIRE(streamed.size() == offline.size());
        for (std::size_t i = 0; i < offline.size(); ++i) {
            CHECK(streamed[i].tau == offline[i].tau);
            CHECK(streamed[i].sigma == offline[i].sigma);
            CHECK(streamed[i].next_tau == offline[i].next_tau);
            CHECK(streamed[i].anchor == offline[i].anchor);
            CHECK(streamed[i].height_gain == offline[i].height_gain);
            CHECK(streamed[i].once_max == offline[i].once_max);
            CHECK(streamed[i].censored == offline[i].censored);
        }
        CHECK(online.span() == *std::max_element(s.begin(), s.end()) - *std::min_element(s.begin(), s.end()));
    }
}

TEST_CASE("once max of single excursions") {
    CHECK(excursion_once_max(std::vector<Site>{1, 0}) == 1);
    CHECK(excursion_once_max(std::vector<Site>{1, 2, 1, 0}) == 2);
    CHECK(excursion_once_max(std::vector<Site>{1, 2, 3, 2, 1, 0}) == 3);
    CHECK(excursion_once_max(std::vector<Site>{1, 2, 1, 2, 3, 4, 3, 2, 1, 0}) == 2);
}

TEST_CASE("containment") {
    CHECK(check_containment(std::vector<Site>{0, 1, 0}) == 0);
    std::uint64_t violations = 0;
    for (std::uint64_t r = 0; r < 10000; ++r) {
        violations += check_containment(testing::random_srw_path(5, r, 1000));
    }
    CHECK(violations == 0);
}

TEST_CASE("containment detects a corrupted tally") {
    std::uint64_t violations = 0;
    for (std::uint64_t r = 0; r < 100; ++r) {
        violations += check_containment<FaultyTally>(testing::random_srw_path(5, r, 1000));
    }
    CHECK(violations > 0);
}

TEST_CASE("height gains follow 1/(k(k+1))") {
    std::vector<std::uint64_t> counts(51, 0);
    std::uint64_t tail = 0;
    std::uint64_t total = 0;
    for (std::uint64_t r = 0; r < 400; ++r) {
        OnlineDecomposer dec(false, false, [&](const ExcursionFrame& f) {
            ++total;
            if (f.height_gain <= 50) {
                ++counts[static_cast<std::size_t>(f.height_gain)];
            } else {
                ++tail;
            }
        });
        RngStream rng(31, r);
        Site pos = 0;
        dec.push(pos);
        for (int t = 0; t < 200000; ++t) {
            pos += rng.bit() ? 1 : -1;
            dec.push(pos);
        }
    }
    REQUIRE(total > 10000);
    std::vector<std::uint64_t> c(counts.begin() + 1, counts.end());
    std::vector<double> p;
    for (std::int64_t k = 1; k <= 50; ++k) p.push_back(exact::height_pmf(k).value());
    auto chi = stats::chi_square_gof(c, p, tail, exact::height_ccdf(51).value());
    CHECK(chi.p_value > 1e-3);
}

TEST_CASE("excursion once max from the walk and from independent excursions agree in law") {
    constexpr std::uint64_t kCap = 2000;
    constexpr double kCensored = std::numeric_limits<std::int64_t>::max();
    std::vector<std::int64_t> from_walk;
    for (std::uint64_t r = 0; r < 150 && from_walk.size() < 20000; ++r) {
        OnlineDecomposer dec(true, false, [&](const ExcursionFrame& f) {
            const auto len = *f.sigma - f.tau + 1;
            from_walk.push_back(len > kCap ? static_cast<std::int64_t>(kCensored) : f.once_max);
        });
        RngStream rng(41, r);
        Site pos = 0;
        dec.push(pos);
        for (int t = 0; t < 200000; ++t) {
            pos += rng.bit() ? 1 : -1;
            dec.push(pos);
        }
    }
    REQUIRE(from_walk.size() >= 10000);

    std::vector<std::int64_t> direct;
    const auto stop = StopRule::first_of({StopRule::return_to_level(0), StopRule::step_budget(kCap - 1)});
    for (std::uint64_t r = 0; r < from_walk.size(); ++r) {
        RngStream rng(43, r);
        auto path = simulate(WalkLaw::simple_symmetric(), 1, stop, rng, {}, true);
        if (path.stop_cause == StopCause::StepBudget) {
            direct.push_back(static_cast<std::int64_t>(kCensored));
        } else {
            direct.push_back(excursion_once_max(path.sites()));
        }
    }
    auto ks = stats::ks_two_sample(from_walk, direct);
    CHECK(ks.p_value > 1e-3);
}

TEST_CASE("ladder experiment records are consistent") {
    std::uint64_t reached = 0;
    for (std::uint64_t r = 0; r < 20000; ++r) {
        RngStream rng(8, r);
        auto rec = ladder_experiment(8, rng);
        if (!rec.reached_k) {
            CHECK_FALSE(rec.a1.has_value());
            CHECK(rec.y_samples.empty());
            continue;
        }
        ++reached;
        for (auto y : rec.y_samples) CHECK(y >= 1);
        for (auto z : rec.z_samples) CHECK(z >= 1);
    }
    CHECK(testing::binomial_z(reached, 20000, 1.0 / 8.0) < 4.0);
    RngStream rng(1, 1);
    CHECK_THROWS(ladder_experiment(1, rng));
}
