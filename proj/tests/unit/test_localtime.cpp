#include "support.hpp"

#include "srwlt/localtime.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <vector>

using namespace srwlt;

namespace {

VisitTally tally_of(const std::vector<Site>& sites, std::uint32_t k_max = VisitTally::kDefaultKMax) {
    VisitTally t(k_max);
    for (Site s : sites) t.record_step(s);
    return t;
}

// Brute-force local times from a map, independent of the tally's storage.
std::map<Site, std::uint64_t> local_times(const std::vector<Site>& sites) {
    std::map<Site, std::uint64_t> m;
    for (Site s : sites) ++m[s];
    return m;
}

void check_sum_invariants(const VisitTally& t, std::uint64_t recorded) {
    std::uint64_t sum_k_gk = 0;
    std::uint64_t sum_gk = 0;
    const auto& hist = t.count_of_counts();
    for (std::size_t k = 1; k < hist.size(); ++k) {
        sum_k_gk += k * hist[k];
        sum_gk += hist[k];
    }
    sum_k_gk += t.overflow_visits();
    sum_gk += t.overflow_sites();
    CHECK(sum_k_gk == recorded);
    CHECK(t.total_visits() == recorded);
    CHECK(sum_gk == static_cast<std::uint64_t>(t.max_site() - t.min_site() + 1));
    CHECK(t.once_count() == static_cast<std::int64_t>(hist[1]));
}

} // namespace

TEST_CASE("tally of short hand-checked paths") {
    auto a = tally_of({0, 1, 2});
    CHECK(a.g(1) == 3);
    CHECK(a.g(2) == 0);
    CHECK(a.max_site() - a.min_site() == 2);

    auto b = tally_of({0, 1, 0});
    CHECK(b.g(1) == 1);
    CHECK(b.g(2) == 1);
    CHECK(b.once_visited_sites() == std::vector<Site>{1});

    auto c = tally_of({0, 1, 2, 1, 0, -1, 0});
    CHECK(c.once_visited_sites() == std::vector<Site>{-1, 2});
    CHECK(c.g(1) == 2);
    CHECK(c.g(3) == 1);
}

TEST_CASE("non-adjacent site is a contract violation") {
    VisitTally t;
    t.record_step(0);
    t.record_step(1);
    CHECK_THROWS_AS(t.record_step(3), ContractViolation);
    CHECK_THROWS_AS(t.record_step(1), ContractViolation);
    CHECK(t.total_visits() == 2);
}

TEST_CASE("empty tally") {
    VisitTally t;
    CHECK(t.empty());
    CHECK(t.once_visited_sites().empty());
    CHECK(t.once_count() == 0);
    CHECK(t.count(0) == 0);
}

TEST_CASE("restricted once count") {
    auto h = tally_of({1, 2, 3});
    CHECK(h.restricted_once_count(1) == 1);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        auto sites = testing::random_srw_path(seed, 0, 2000);
        auto t = tally_of(sites);
        CHECK(t.restricted_once_count(t.max_site()) == t.once_count());
        CHECK(t.restricted_once_count(t.min_site() - 1) == 0);
        const Site mid = (t.min_site() + t.max_site()) / 2;
        std::int64_t brute = 0;
        for (const auto& [site, c] : local_times(sites)) brute += (c == 1 && site <= mid) ? 1 : 0;
        CHECK(t.restricted_once_count(mid) == brute);
    }
}

TEST_CASE("tally invariants after every step of random paths") {
    for (std::uint32_t k_max : {2U, 64U}) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            auto sites = testing::random_srw_path(seed, 7, 3000);
            VisitTally t(k_max);
            std::int64_t prev_once = 0;
            for (std::size_t i = 0; i < sites.size(); ++i) {
                t.record_step(sites[i]);
                const std::int64_t delta = t.once_count() - prev_once;
                CHECK((delta == 1 || delta == -1 || delta == 0));
                prev_once = t.once_count();
                if (i % 97 == 0 || i + 1 == sites.size()) check_sum_invariants(t, i + 1);
            }
            // counts and g_k against a brute-force map
            const auto lt = local_times(sites);
            std::map<std::uint64_t, std::uint64_t> brute_g;
            for (const auto& [site, c] : lt) {
                CHECK(t.count(site) == c);
                ++brute_g[c];
            }
            for (std::uint64_t k = 1; k <= 80; ++k) CHECK(t.g(k) == brute_g[k]);
        }
    }
}

TEST_CASE("once-visited sites equal a brute-force scan") {
    auto sites = testing::random_srw_path(123, 0, 10000);
    auto t = tally_of(sites);
    std::vector<Site> brute;
    for (const auto& [site, c] : local_times(sites)) {
        if (c == 1) brute.push_back(site);
    }
    CHECK(t.once_visited_sites() == brute);
    CHECK(static_cast<std::int64_t>(t.once_visited_sites().size()) == t.once_count());
}

TEST_CASE("reset clears the tally") {
    auto t = tally_of({0, 1, 0, -1});
    t.reset();
    CHECK(t.empty());
    t.record_step(10);
    CHECK(t.once_count() == 1);
    CHECK(t.min_site() == 10);
}

TEST_CASE("once trackers on hand-checked paths") {
    SUBCASE("running max over (0,1,0)") {
        VisitTally t;
        OnceTrackers tr;
        for (Site s : {0, 1, 0}) {
            t.record_step(s);
            tr.observe_instant(t, s);
        }
        CHECK(tr.running_max_over_time() == 2);
    }
    SUBCASE("monotone path snapshots") {
        VisitTally t;
        OnceTrackers tr;
        for (Site s = 0; s <= 12; ++s) {
            t.record_step(s);
            tr.observe_instant(t, s);
        }
        for (Site s = 0; s <= 12; ++s) CHECK(tr.snapshot(s) == s + 1);
        CHECK(tr.top_level() == 12);
    }
    SUBCASE("forced avoid-zero path gives g(2) = 2") {
        RngStream rng(1, 0);
        VisitTally t;
        OnceTrackers tr;
        simulate_with(WalkLaw::avoid_zero(), 1, StopRule::hit_level(2), rng, [&](Site s) {
            t.record_step(s);
            tr.observe_instant(t, s);
        });
        CHECK(tr.snapshot(2) == 2);
    }
}

TEST_CASE("once tracker invariants on random paths") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto sites = testing::random_srw_path(seed, 3, 5000);
        VisitTally t;
        OnceTrackers tr(Site{5});
        std::int64_t prev_max = 0;
        Site record = sites.front();
        std::vector<std::int64_t> expected_snapshots;
        for (Site s : sites) {
            t.record_step(s);
            tr.observe_instant(t, s);
            CHECK(tr.running_max_over_time() >= prev_max);
            CHECK(tr.running_max_over_time() >= t.once_count());
            prev_max = tr.running_max_over_time();
            if (expected_snapshots.empty() || s > record) {
                record = s;
                expected_snapshots.push_back(t.once_count());
            }
            CHECK(tr.restricted_once() == t.restricted_once_count(5));
        }
        CHECK(tr.snapshots() == expected_snapshots);
        CHECK(static_cast<Site>(tr.snapshots().size()) == t.max_site() - sites.front() + 1);
    }
}

TEST_CASE("g(s) is at least one for the avoid-zero walk") {
    for (std::uint64_t r = 0; r < 2000; ++r) {
        RngStream rng(77, r);
        VisitTally t;
        OnceTrackers tr;
        simulate_with(WalkLaw::avoid_zero(), 1, StopRule::hit_level(40), rng, [&](Site s) {
            t.record_step(s);
            tr.observe_instant(t, s);
        });
        for (Site s = 1; s <= 40; ++s) CHECK(*tr.snapshot(s) >= 1);
        CHECK(t.count(40) == 1);
    }
}
