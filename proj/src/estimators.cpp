#include "srwlt/estimators.hpp"

#include "srwlt/error.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

namespace srwlt {

namespace {

constexpr std::uint64_t tag(StreamTag t) { return static_cast<std::uint64_t>(t); }

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

} // namespace

unsigned effective_workers(std::uint64_t replicas, unsigned threads) noexcept {
    const std::uint64_t w = std::min<std::uint64_t>(std::max(1U, threads), std::max<std::uint64_t>(replicas, 1));
    return static_cast<unsigned>(w);
}

void for_each_replica(std::uint64_t replicas, unsigned threads,
                      const std::function<void(unsigned worker, std::uint64_t replica)>& body) {
    const unsigned workers = effective_workers(replicas, threads);
    if (workers == 1) {
        for (std::uint64_t r = 0; r < replicas; ++r) body(0, r);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t lo = replicas * w / workers;
        const std::uint64_t hi = replicas * (w + 1) / workers;
        pool.emplace_back([&, w, lo, hi] {
            try {
                for (std::uint64_t r = lo; r < hi; ++r) body(w, r);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

MeanEstimate estimate_mean_gk(std::int64_t n, std::int64_t k, std::uint64_t replicas, std::uint64_t seed,
                              unsigned threads) {
    require(n >= 1, "estimate_mean_gk: n must be at least 1");
    require(k >= 1, "estimate_mean_gk: k must be at least 1");
    require(replicas >= 1, "estimate_mean_gk: replicas must be positive");
    const unsigned workers = effective_workers(replicas, threads);
    std::vector<stats::IntegerMoments> partial(workers);
    std::vector<VisitTally> tallies(workers);
    for_each_replica(replicas, workers, [&](unsigned w, std::uint64_t r) {
        auto rng = derive_stream(seed, stream_id(tag(StreamTag::MeanGk), static_cast<std::uint64_t>(n), r));
        auto& tally = tallies[w];
        tally.reset();
        Site pos = 0;
        tally.record_step(pos);
        for (std::int64_t t = 0; t < n; ++t) {
            pos += rng.bit() ? 1 : -1;
            tally.record_step(pos);
        }
        partial[w].add(static_cast<std::int64_t>(tally.g(static_cast<std::uint64_t>(k))));
    });
    MeanEstimate out;
    for (const auto& p : partial) {
        out.moments.n += p.n;
        out.moments.sum += p.sum;
        out.moments.sum_sq += p.sum_sq;
    }
    return out;
}

ContainmentReport containment_run(std::int64_t n, std::uint64_t replicas, std::uint64_t seed, unsigned threads) {
    require(n >= 1, "containment_run: n must be at least 1");
    const unsigned workers = effective_workers(replicas, threads);
    std::vector<std::uint64_t> violations(workers, 0);
    std::vector<std::vector<Site>> paths(workers);
    for_each_replica(replicas, workers, [&](unsigned w, std::uint64_t r) {
        auto rng = derive_stream(seed, stream_id(tag(StreamTag::Containment), 0, r));
        auto& sites = paths[w];
        sites.resize(static_cast<std::size_t>(n) + 1);
        sites[0] = 0;
        for (std::size_t t = 1; t < sites.size(); ++t) sites[t] = sites[t - 1] + (rng.bit() ? 1 : -1);
        violations[w] += check_containment<VisitTally>(std::span<const Site>(sites));
    });
    ContainmentReport out;
    out.paths = replicas;
    out.violations = std::accumulate(violations.begin(), violations.end(), std::uint64_t{0});
    return out;
}

std::vector<HeightLawPoint> height_law_mc(const std::vector<std::int64_t>& levels, std::uint64_t replicas,
                                          std::uint64_t seed, unsigned threads) {
    require(!levels.empty(), "height_law_mc: no levels");
    for (auto k : levels) require(k >= 1, "height_law_mc: levels must be at least 1");
    const std::int64_t top = *std::max_element(levels.begin(), levels.end());
    const unsigned workers = effective_workers(replicas, threads);
    std::vector<std::vector<std::uint64_t>> hits(workers, std::vector<std::uint64_t>(levels.size(), 0));
    const auto law = WalkLaw::simple_symmetric();
    const auto stop = StopRule::first_of({StopRule::return_to_level(0), StopRule::hit_level(top)});
    for_each_replica(replicas, workers, [&](unsigned w, std::uint64_t r) {
        auto rng = derive_stream(seed, stream_id(tag(StreamTag::HeightLaw), 0, r));
        Site max_site = 1;
        simulate_with(law, 1, stop, rng, [&](Site s) {
            if (s > max_site) max_site = s;
        });
        for (std::size_t i = 0; i < levels.size(); ++i) {
            if (max_site >= levels[i]) ++hits[w][i];
        }
    });
    std::vector<HeightLawPoint> out;
    for (std::size_t i = 0; i < levels.size(); ++i) {
        HeightLawPoint p;
        p.k = levels[i];
        p.freq.trials = replicas;
        for (const auto& h : hits) p.freq.successes += h[i];
        out.push_back(p);
    }
    return out;
}

std::string to_string(TailMode mode) {
    return mode == TailMode::AtLevel ? "at_level" : "max_over_levels";
}

HProcessRun run_h_process(std::int64_t s, RngStream& rng, VisitTally& tally, std::uint64_t budget) {
    if (s < 1) throw DomainError("run_h_process: level must be at least 1");
    HProcessRun out;
    out.snapshots.reserve(static_cast<std::size_t>(s));
    Stepper stepper(WalkLaw::avoid_zero());
    OnceTrackers trackers;
    tally.reset();
    Site pos = 1;
    tally.record_step(pos);
    trackers.observe_instant(tally, pos);
    std::uint64_t t = 0;
    while (pos != s) {
        if (t >= budget) {
            out.censored = true;
            break;
        }
        pos += stepper.step(pos, rng);
        ++t;
        tally.record_step(pos);
        trackers.observe_instant(tally, pos);
    }
    out.steps = t;
    out.snapshots = trackers.snapshots();
    out.restricted = tally.restricted_once_count(s / 2);
    return out;
}

GDistribution sample_g_distribution(std::int64_t s, std::uint64_t replicas, TailMode mode, bool restricted,
                                    std::uint64_t seed, unsigned threads, std::uint64_t budget) {
    require(s >= 2, "tail-g: s must be at least 2");
    require(replicas >= 1, "tail-g: replicas must be positive");
    require(!(restricted && mode == TailMode::MaxOverLevels),
            "tail-g: the restricted statistic is only defined at a single level (mode at_level)");
    const unsigned workers = effective_workers(replicas, threads);
    std::vector<std::int64_t> values(replicas, -1);
    std::vector<VisitTally> tallies(workers);
    for_each_replica(replicas, workers, [&](unsigned w, std::uint64_t r) {
        auto rng = derive_stream(seed, stream_id(tag(StreamTag::TailG), static_cast<std::uint64_t>(s), r));
        const auto run = run_h_process(s, rng, tallies[w], budget);
        if (run.censored) return;
        if (restricted) {
            values[r] = run.restricted;
        } else if (mode == TailMode::AtLevel) {
            values[r] = run.snapshots.back();
        } else {
            values[r] = *std::max_element(run.snapshots.begin(), run.snapshots.end());
        }
    });
    GDistribution dist;
    dist.s = s;
    dist.mode = mode;
    dist.restricted = restricted;
    dist.replicas = replicas;
    dist.histogram.assign(static_cast<std::size_t>(s) + 1, 0);
    for (auto v : values) {
        if (v < 0) {
            ++dist.censored;
        } else {
            ++dist.histogram[static_cast<std::size_t>(v)];
        }
    }
    return dist;
}

TailEstimate tail_from_distribution(const GDistribution& dist, std::int64_t threshold) {
    TailEstimate out;
    out.threshold = threshold;
    out.method = TailEstimate::Method::Direct;
    out.censored = dist.censored;
    const std::uint64_t n = dist.replicas - dist.censored;
    out.replicas = n;
    for (std::size_t g = 0; g < dist.histogram.size(); ++g) {
        if (static_cast<std::int64_t>(g) >= threshold) out.hits += dist.histogram[g];
    }
    const stats::Proportion p{out.hits, n};
    out.probability_hat = p.p();
    out.stderr_ = p.stderr_();
    return out;
}

TailEstimate estimate_tail_g(std::int64_t s, std::int64_t threshold, std::uint64_t replicas, TailMode mode,
                             bool restricted, std::uint64_t seed, unsigned threads, std::uint64_t budget) {
    return tail_from_distribution(sample_g_distribution(s, replicas, mode, restricted, seed, threads, budget),
                                  threshold);
}

BinomialMomentMc binomial_moment_mc(const GDistribution& dist, std::int64_t k) {
    if (k < 0) throw DomainError("binomial_moment_mc: k must be nonnegative");
    double n = 0.0;
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t g = 0; g < dist.histogram.size(); ++g) {
        const auto c = static_cast<double>(dist.histogram[g]);
        if (c == 0.0) continue;
        double b = 1.0;
        for (std::int64_t i = 0; i < k; ++i) {
            b *= static_cast<double>(static_cast<std::int64_t>(g) - i) / static_cast<double>(i + 1);
        }
        if (static_cast<std::int64_t>(g) < k) b = 0.0;
        n += c;
        sum += c * b;
        sum_sq += c * b * b;
    }
    BinomialMomentMc out;
    if (n == 0.0) return out;
    out.mean = sum / n;
    if (n > 1.0) {
        const double var = std::max(0.0, (sum_sq - n * out.mean * out.mean) / (n - 1.0));
        out.stderr_ = std::sqrt(var / n);
    }
    return out;
}

ConditionedExcursion sample_excursion_given_max(std::int64_t k, RngStream& rng, bool with_descent,
                                                bool retain_sites) {
    if (k < 1) throw DomainError("sample_excursion_given_max: k must be at least 1");
    ConditionedExcursion out;
    VisitTally tally;
    Stepper up(WalkLaw::avoid_zero());
    Site pos = 1;
    auto visit = [&](Site s) {
        tally.record_step(s);
        if (retain_sites) out.sites.push_back(s);
        out.max_site = std::max(out.max_site, s);
        out.once_max_full = std::max(out.once_max_full, tally.once_count());
    };
    visit(pos);
    while (pos != k) {
        pos += up.step(pos, rng);
        ++out.length;
        visit(pos);
    }
    out.once_max_ascent = out.once_max_full;
    if (!with_descent) return out;
    Stepper down(WalkLaw::ceiling_stay(k));
    for (;;) {
        pos += down.step(pos, rng);
        ++out.length;
        if (pos == 0) {
            out.reached_zero = true;
            if (retain_sites) out.sites.push_back(pos);
            break;
        }
        visit(pos);
    }
    return out;
}

std::vector<std::uint64_t> allocate_strata(std::int64_t threshold, std::int64_t height_cap, const Proposal& proposal,
                                           std::uint64_t replicas) {
    const std::int64_t lo = std::max<std::int64_t>(threshold, 1);
    require(height_cap >= lo, "tail-excursion: height cap K must be at least max(M, 1)");
    const auto strata = static_cast<std::size_t>(height_cap - lo + 1);
    std::vector<double> mass(strata, 0.0);
    switch (proposal.kind) {
    case Proposal::Kind::LogUniform:
        for (std::size_t i = 0; i < strata; ++i) {
            // uniform in log k: the mass of [k - 1/2, k + 1/2] in log scale
            const double k = static_cast<double>(lo) + static_cast<double>(i);
            mass[i] = std::log((k + 0.5) / (k - 0.5));
        }
        break;
    case Proposal::Kind::Uniform: std::fill(mass.begin(), mass.end(), 1.0); break;
    case Proposal::Kind::Custom: {
        require(proposal.masses.size() == strata, "tail-excursion: custom proposal needs one mass per stratum k = M..K");
        double total = 0.0;
        for (double m : proposal.masses) {
            require(std::isfinite(m) && m >= 0.0, "tail-excursion: proposal masses must be finite and nonnegative");
            total += m;
        }
        require(total > 0.0, "tail-excursion: proposal masses must have a positive sum");
        mass = proposal.masses;
        break;
    }
    }
    const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
    std::vector<std::uint64_t> alloc(strata, 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::uint64_t used = 0;
    for (std::size_t i = 0; i < strata; ++i) {
        const double exact = static_cast<double>(replicas) * mass[i] / total;
        alloc[i] = static_cast<std::uint64_t>(std::floor(exact));
        used += alloc[i];
        remainders.emplace_back(exact - std::floor(exact), i);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t i = 0; used < replicas && i < remainders.size(); ++i, ++used) ++alloc[remainders[i].second];
    for (auto& a : alloc) a = std::max<std::uint64_t>(a, 2);
    return alloc;
}

TailEstimate estimate_excursion_tail(std::int64_t threshold, std::int64_t height_cap, const Proposal& proposal,
                                     std::uint64_t replicas, std::uint64_t seed, unsigned threads) {
    require(threshold >= 1, "tail-excursion: M must be at least 1");
    require(height_cap <= 0xffff, "tail-excursion: height cap K is limited to 65535");
    const auto alloc = allocate_strata(threshold, height_cap, proposal, replicas);
    const std::int64_t lo = threshold;

    std::vector<std::uint64_t> offsets(alloc.size() + 1, 0);
    for (std::size_t i = 0; i < alloc.size(); ++i) offsets[i + 1] = offsets[i] + alloc[i];
    const std::uint64_t total = offsets.back();

    std::vector<std::uint8_t> hit(total, 0);
    for_each_replica(total, threads, [&](unsigned, std::uint64_t g) {
        const auto it = std::upper_bound(offsets.begin(), offsets.end(), g);
        const auto stratum = static_cast<std::size_t>(it - offsets.begin() - 1);
        const std::int64_t k = lo + static_cast<std::int64_t>(stratum);
        auto rng = derive_stream(seed, stream_id(tag(StreamTag::ExcursionStratified), static_cast<std::uint64_t>(k),
                                                 g - offsets[stratum]));
        const auto exc = sample_excursion_given_max(k, rng, false);
        hit[g] = exc.once_max_ascent >= threshold ? 1 : 0;
    });

    TailEstimate out;
    out.threshold = threshold;
    out.method = TailEstimate::Method::Stratified;
    out.replicas = total;
    out.truncation_bound = 1.0 / static_cast<double>(height_cap + 1);
    double var = 0.0;
    double p_hat = 0.0;
    for (std::size_t i = 0; i < alloc.size(); ++i) {
        Stratum st;
        st.height = lo + static_cast<std::int64_t>(i);
        st.weight = 1.0 / (static_cast<double>(st.height) * static_cast<double>(st.height + 1));
        st.replicas = alloc[i];
        for (std::uint64_t g = offsets[i]; g < offsets[i + 1]; ++g) st.hits += hit[g];
        const stats::Proportion prop{st.hits, st.replicas};
        st.conditional_hat = prop.p();
        st.conditional_stderr = prop.stderr_();
        p_hat += st.weight * st.conditional_hat;
        var += st.weight * st.weight * st.conditional_stderr * st.conditional_stderr;
        out.hits += st.hits;
        out.strata.push_back(st);
    }
    out.probability_hat = p_hat;
    out.stderr_ = std::sqrt(var);
    return out;
}

TailEstimate estimate_excursion_tail_direct(std::int64_t threshold, std::int64_t ceiling, std::uint64_t replicas,
                                            std::uint64_t seed, unsigned threads) {
    require(threshold >= 1, "tail-excursion direct: M must be at least 1");
    require(ceiling >= 1, "tail-excursion direct: ceiling must be at least 1");
    require(replicas >= 1, "tail-excursion direct: replicas must be positive");
    const unsigned workers = effective_workers(replicas, threads);
    std::vector<std::uint64_t> hits(workers, 0);
    std::vector<VisitTally> tallies(workers);
    for_each_replica(replicas, workers, [&](unsigned w, std::uint64_t r) {
        auto rng = derive_stream(seed, stream_id(tag(StreamTag::ExcursionDirect), 0, r));
        auto& tally = tallies[w];
        tally.reset();
        Site pos = 1;
        tally.record_step(pos);
        std::int64_t once_max = 1;
        for (;;) {
            pos += rng.bit() ? 1 : -1;
            if (pos == 0) {
                if (once_max >= threshold) ++hits[w];
                return;
            }
            if (pos > ceiling) return;
            tally.record_step(pos);
            if (tally.once_count() > once_max) once_max = tally.once_count();
        }
    });
    TailEstimate out;
    out.threshold = threshold;
    out.method = TailEstimate::Method::Direct;
    out.replicas = replicas;
    out.hits = std::accumulate(hits.begin(), hits.end(), std::uint64_t{0});
    const stats::Proportion p{out.hits, replicas};
    out.probability_hat = p.p();
    out.stderr_ = p.stderr_();
    out.truncation_bound = 1.0 / static_cast<double>(ceiling + 1);
    return out;
}

LadderSummary ladder_run(std::int64_t k, std::uint64_t replicas, std::uint64_t seed, unsigned threads,
                         const LadderOptions& options) {
    require(k >= 2, "ladder: K must be at least 2");
    require(replicas >= 1, "ladder: replicas must be positive");
    LadderOptions opts = options;
    if (opts.y_tail_cap <= 0) opts.y_tail_cap = 4 * k;
    const unsigned workers = effective_workers(replicas, threads);
    std::vector<LadderSummary> partial(workers);
    for (auto& p : partial) {
        p.y_counts.assign(static_cast<std::size_t>(opts.y_tail_cap), 0);
    }
    for_each_replica(replicas, workers, [&](unsigned w, std::uint64_t r) {
        auto rng = derive_stream(seed, stream_id(tag(StreamTag::Ladder), 0, r));
        const auto rec = ladder_experiment(k, rng, opts);
        auto& p = partial[w];
        if (rec.censored) ++p.censored;
        if (!rec.reached_k) return;
        ++p.reached;
        if (rec.a1) {
            ++p.a1_decided;
            if (*rec.a1) ++p.a1_success;
        }
        for (auto y : rec.y_samples) ++p.y_counts[static_cast<std::size_t>(y)];
        p.y_tail += rec.y_tail;
        for (auto z : rec.z_samples) {
            if (static_cast<std::size_t>(z) >= p.z_counts.size()) p.z_counts.resize(static_cast<std::size_t>(z) + 1, 0);
            ++p.z_counts[static_cast<std::size_t>(z)];
        }
    });
    LadderSummary out;
    out.k = k;
    out.replicas = replicas;
    out.y_tail_cap = opts.y_tail_cap;
    out.y_counts.assign(static_cast<std::size_t>(opts.y_tail_cap), 0);
    for (const auto& p : partial) {
        out.reached += p.reached;
        out.a1_decided += p.a1_decided;
        out.a1_success += p.a1_success;
        out.censored += p.censored;
        out.y_tail += p.y_tail;
        for (std::size_t i = 0; i < p.y_counts.size(); ++i) out.y_counts[i] += p.y_counts[i];
        if (p.z_counts.size() > out.z_counts.size()) out.z_counts.resize(p.z_counts.size(), 0);
        for (std::size_t i = 0; i < p.z_counts.size(); ++i) out.z_counts[i] += p.z_counts[i];
    }
    return out;
}

namespace {

// Streaming decomposition of a simple random walk from 0, recording sigma_j
// and R_{sigma_j} at the requested excursion indices. Where the walk is more
// than 64 sites from every level that could change the state (interval ends
// while inward; anchor and the growing extreme while outward), 64 steps are
// applied at once from one word of the bit stream. bits64() continues the
// bit() sequence, so the path is identical to stepping one bit at a time.
struct GrowthWalker {
    std::vector<std::int64_t> sigma_at;
    std::vector<std::int64_t> span_at;

    void run(RngStream& rng, std::int64_t j_max, const std::vector<std::int64_t>& checkpoints, std::uint64_t budget) {
        sigma_at.assign(checkpoints.size(), -1);
        span_at.assign(checkpoints.size(), -1);
        std::size_t next_cp = 0;
        Site pos = 0;
        Site lo = 0;
        Site hi = 0;
        Site anchor = 0;
        bool outward = false;
        bool upward = false;
        std::int64_t closed = 0;
        std::uint64_t t = 0;
        while (closed < j_max && t < budget) {
            bool bulk = false;
            if (!outward) {
                bulk = pos - lo > 64 && hi - pos > 64;
            } else if (upward) {
                bulk = pos - anchor > 64 && hi - pos > 64;
            } else {
                bulk = anchor - pos > 64 && pos - lo > 64;
            }
            if (bulk) {
                const std::uint64_t w = rng.bits64();
                pos += 2 * static_cast<Site>(std::popcount(w)) - 64;
                t += 64;
                continue;
            }
            pos += rng.bit() ? 1 : -1;
            ++t;
            if (!outward) {
                if (pos < lo || pos > hi) {
                    outward = true;
                    upward = pos > hi;
                    anchor = upward ? hi : lo;
                    if (upward) {
                        hi = pos;
                    } else {
                        lo = pos;
                    }
                }
                continue;
            }
            if (pos == anchor) {
                outward = false;
                ++closed;
                while (next_cp < checkpoints.size() && checkpoints[next_cp] == closed) {
                    if (t <= budget) {
                        sigma_at[next_cp] = static_cast<std::int64_t>(t);
                        span_at[next_cp] = hi - lo;
                    }
                    ++next_cp;
                }
                continue;
            }
            if (pos > hi) hi = pos;
            if (pos < lo) lo = pos;
        }
    }
};

} // namespace

std::vector<GrowthPoint> sigma_growth(std::int64_t j_max, const std::vector<std::int64_t>& checkpoints,
                                      std::uint64_t replicas, std::uint64_t budget, std::uint64_t seed,
                                      unsigned threads) {
    require(j_max >= 2, "sigma-growth: j_max must be at least 2");
    require(budget >= 1, "sigma-growth: an explicit positive step budget is required");
    require(replicas >= 1, "sigma-growth: replicas must be positive");
    std::vector<std::int64_t> cps = checkpoints;
    std::sort(cps.begin(), cps.end());
    cps.erase(std::unique(cps.begin(), cps.end()), cps.end());
    for (auto j : cps) require(j >= 2 && j <= j_max, "sigma-growth: checkpoints must lie in [2, j_max]");

    std::vector<std::vector<std::int64_t>> sigma(cps.size(), std::vector<std::int64_t>(replicas, -1));
    std::vector<std::vector<std::int64_t>> span(cps.size(), std::vector<std::int64_t>(replicas, -1));
    for_each_replica(replicas, threads, [&](unsigned, std::uint64_t r) {
        auto rng = derive_stream(seed, stream_id(tag(StreamTag::SigmaGrowth), 0, r));
        GrowthWalker walker;
        walker.run(rng, cps.empty() ? j_max : std::min(j_max, cps.back()), cps, budget);
        for (std::size_t i = 0; i < cps.size(); ++i) {
            sigma[i][r] = walker.sigma_at[i];
            span[i][r] = walker.span_at[i];
        }
    });

    std::vector<GrowthPoint> out;
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cps.size(); ++i) {
        GrowthPoint gp;
        gp.j = cps[i];
        const double lj = std::log(static_cast<double>(gp.j));
        for (std::uint64_t r = 0; r < replicas; ++r) {
            const auto sg = sigma[i][r];
            if (sg < 0) {
                ++gp.censored;
                gp.log_sigma_ratio.push_back(inf);
                gp.log_span_ratio.push_back(inf);
            } else {
                gp.log_sigma_ratio.push_back(std::log(static_cast<double>(sg)) / lj);
                gp.log_span_ratio.push_back(std::log(static_cast<double>(span[i][r])) / lj);
            }
            gp.sigma.push_back(sg);
            gp.span.push_back(span[i][r]);
        }
        gp.median_sigma = stats::quantile(gp.log_sigma_ratio, 0.5);
        gp.q25_sigma = stats::quantile(gp.log_sigma_ratio, 0.25);
        gp.q75_sigma = stats::quantile(gp.log_sigma_ratio, 0.75);
        gp.median_span = stats::quantile(gp.log_span_ratio, 0.5);
        gp.q25_span = stats::quantile(gp.log_span_ratio, 0.25);
        gp.q75_span = stats::quantile(gp.log_span_ratio, 0.75);
        out.push_back(std::move(gp));
    }
    return out;
}

std::string to_string(ScalingReport::Status status) {
    switch (status) {
    case ScalingReport::Status::Satisfied: return "satisfied";
    case ScalingReport::Status::Violated: return "violated";
    case ScalingReport::Status::Inconclusive: return "inconclusive";
    case ScalingReport::Status::NotApplicable: return "not_applicable";
    }
    return "?";
}

double scaling_factor(std::int64_t n1, std::int64_t n2) {
    const auto a = static_cast<double>(n1);
    return static_cast<double>(n2 - n1) / (8.0 * a * (std::log(a) + 1.0));
}

ScalingReport check_scaling_inequality(std::int64_t n1, std::int64_t n2, std::int64_t threshold,
                                       std::uint64_t replicas, std::uint64_t seed, unsigned threads,
                                       std::uint64_t budget) {
    require(n1 >= 1 && n1 <= n2, "scaling-check: requires 0 < N1 <= N2");
    require(threshold >= 1, "scaling-check: M must be at least 1");
    ScalingReport rep;
    rep.n1 = n1;
    rep.n2 = n2;
    rep.threshold = threshold;
    rep.factor = scaling_factor(n1, n2);
    if (n1 == n2) {
        rep.status = ScalingReport::Status::Satisfied;
        return rep;
    }
    require(replicas >= 2, "scaling-check: replicas must be at least 2");
    rep.replicas = replicas;

    // per replica: bit 0 = event at N1, bit 1 = event at N2, 4 = censored
    std::vector<std::uint8_t> events(replicas, 0);
    const unsigned workers = effective_workers(replicas, threads);
    std::vector<VisitTally> tallies(workers);
    for_each_replica(replicas, workers, [&](unsigned w, std::uint64_t r) {
        auto rng = derive_stream(seed, stream_id(tag(StreamTag::Scaling), 0, r));
        const auto run = run_h_process(n2, rng, tallies[w], budget);
        if (run.censored) {
            events[r] = 4;
            return;
        }
        const auto first = run.snapshots.begin();
        const std::int64_t max1 = *std::max_element(first, first + n1);
        const std::int64_t max2 = *std::max_element(first, run.snapshots.end());
        events[r] = static_cast<std::uint8_t>((max1 >= threshold ? 1 : 0) | (max2 >= threshold ? 2 : 0));
    });

    std::uint64_t n_both = 0;
    std::uint64_t n_only2 = 0;
    std::uint64_t n_only1 = 0;
    std::uint64_t n = 0;
    for (auto e : events) {
        if (e == 4) {
            ++rep.censored;
            continue;
        }
        ++n;
        if (e == 3) ++n_both;
        if (e == 2) ++n_only2;
        if (e == 1) ++n_only1;
    }
    rep.hits_n1 = n_both + n_only1;
    rep.hits_n2 = n_both + n_only2;
    const auto nn = static_cast<double>(n);
    rep.lhs_hat = static_cast<double>(rep.hits_n2) / nn;
    rep.lhs_stderr = stats::Proportion{rep.hits_n2, n}.stderr_();
    rep.rhs_p_hat = static_cast<double>(rep.hits_n1) / nn;
    rep.rhs_bound = rep.factor * rep.rhs_p_hat;

    // paired differences d = 1{A2} - factor * 1{A1}
    const double f = rep.factor;
    const double sum = static_cast<double>(n_both) * (1.0 - f) + static_cast<double>(n_only2) -
                       static_cast<double>(n_only1) * f;
    const double sum_sq = static_cast<double>(n_both) * (1.0 - f) * (1.0 - f) + static_cast<double>(n_only2) +
                          static_cast<double>(n_only1) * f * f;
    rep.margin = sum / nn;
    const double var = std::max(0.0, (sum_sq - nn * rep.margin * rep.margin) / (nn - 1.0));
    rep.margin_stderr = std::sqrt(var / nn);

    if (rep.hits_n2 == 0) {
        rep.status = ScalingReport::Status::Inconclusive;
    } else if (rep.lhs_hat > 0.1) {
        rep.status = ScalingReport::Status::NotApplicable;
    } else if (rep.margin >= 3.0 * rep.margin_stderr) {
        rep.status = ScalingReport::Status::Satisfied;
    } else if (rep.margin <= -3.0 * rep.margin_stderr) {
        rep.status = ScalingReport::Status::Violated;
    } else {
        rep.status = ScalingReport::Status::Inconclusive;
    }
    return rep;
}

ExponentFit fit_exponent(const std::vector<ExponentPoint>& points, double confidence) {
    if (points.size() < 2) throw DomainError("fit_exponent: needs at least two points");
    if (!(confidence > 0.0 && confidence < 1.0)) throw DomainError("fit_exponent: confidence must lie in (0, 1)");
    bool all_zero = true;
    bool any_zero = false;
    for (const auto& p : points) {
        if (!(p.p_hat > 0.0)) throw DomainError("fit_exponent: p_hat = 0 has no logarithm");
        if (p.stderr_ < 0.0) throw DomainError("fit_exponent: negative stderr");
        all_zero = all_zero && p.stderr_ == 0.0;
        any_zero = any_zero || p.stderr_ == 0.0;
    }
    if (any_zero && !all_zero) throw DomainError("fit_exponent: mixed zero and nonzero standard errors");

    const std::size_t n = points.size();
    std::vector<double> w(n);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = std::log(points[i].p_hat);
        const double se_log = points[i].stderr_ / points[i].p_hat;
        w[i] = all_zero ? 1.0 : 1.0 / (se_log * se_log);
    }
    double sw = 0.0;
    double sx = 0.0;
    double sy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sw += w[i];
        sx += w[i] * points[i].x;
        sy += w[i] * y[i];
    }
    const double xbar = sx / sw;
    const double ybar = sy / sw;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = points[i].x - xbar;
        sxx += w[i] * dx * dx;
        sxy += w[i] * dx * (y[i] - ybar);
    }
    if (sxx == 0.0) throw DomainError("fit_exponent: all x values coincide");

    ExponentFit fit;
    fit.weighted = !all_zero;
    fit.slope = sxy / sxx;
    fit.intercept = ybar - fit.slope * xbar;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * points[i].x);
        fit.residual += w[i] * r * r;
    }
    if (fit.weighted) {
        fit.slope_stderr = 1.0 / std::sqrt(sxx);
    } else if (n > 2) {
        fit.slope_stderr = std::sqrt(fit.residual / static_cast<double>(n - 2) / sxx);
    }
    const boost::math::normal normal;
    const double z = boost::math::quantile(normal, 0.5 + confidence / 2.0);
    fit.ci_low = fit.slope - z * fit.slope_stderr;
    fit.ci_high = fit.slope + z * fit.slope_stderr;
    return fit;
}

} // namespace srwlt
