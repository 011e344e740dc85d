#pragma once

#include "srwlt/excursions.hpp"
#include "srwlt/localtime.hpp"
#include "srwlt/rng.hpp"
#include "srwlt/stats.hpp"
#include "srwlt/walk.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace srwlt {

/// Stream tags (top 16 bits of the stream index) keeping the random streams
/// of different experiments disjoint under one master seed.
enum class StreamTag : std::uint64_t {
    MeanGk = 1,
    TailG = 2,
    ExcursionStratified = 3,
    ExcursionDirect = 4,
    Ladder = 5,
    SigmaGrowth = 6,
    Scaling = 7,
    HeightLaw = 8,
    Containment = 9,
};

/// Runs body(r) for r in [0, replicas) on up to `threads` workers with static
/// contiguous chunks. body must only touch replica-indexed or worker-local
/// state; worker w owns chunk w, so merging worker results in index order is
/// deterministic.
void for_each_replica(std::uint64_t replicas, unsigned threads,
                      const std::function<void(unsigned worker, std::uint64_t replica)>& body);
unsigned effective_workers(std::uint64_t replicas, unsigned threads) noexcept;

struct MeanEstimate {
    stats::IntegerMoments moments;
    double mean() const noexcept { return moments.mean(); }
    double stderr_() const noexcept { return moments.stderr_(); }
};

/// Sample mean of g_k(n) over independent simple random walk paths of n steps.
MeanEstimate estimate_mean_gk(std::int64_t n, std::int64_t k, std::uint64_t replicas, std::uint64_t seed,
                              unsigned threads = 1);

/// Containment check over `replicas` simple random walk paths of n steps.
struct ContainmentReport {
    std::uint64_t paths = 0;
    std::uint64_t violations = 0;
};
ContainmentReport containment_run(std::int64_t n, std::uint64_t replicas, std::uint64_t seed, unsigned threads = 1);

/// Empirical P(max of an excursion from 1 >= k) for each requested k, from
/// excursions stopped at the return to 0 or at max(levels).
struct HeightLawPoint {
    std::int64_t k = 0;
    stats::Proportion freq;
};
std::vector<HeightLawPoint> height_law_mc(const std::vector<std::int64_t>& levels, std::uint64_t replicas,
                                          std::uint64_t seed, unsigned threads = 1);

enum class TailMode { AtLevel, MaxOverLevels };
std::string to_string(TailMode mode);

struct Stratum {
    std::int64_t height = 0;
    double weight = 0.0;
    std::uint64_t hits = 0;
    std::uint64_t replicas = 0;
    double conditional_hat = 0.0;
    double conditional_stderr = 0.0;
};

struct TailEstimate {
    enum class Method { Direct, Stratified };

    std::int64_t threshold = 0;
    double probability_hat = 0.0;
    double stderr_ = 0.0;
    std::uint64_t replicas = 0;
    std::uint64_t hits = 0;
    Method method = Method::Direct;
    std::vector<Stratum> strata;
    /// Probability mass outside the simulated event (0 when none).
    double truncation_bound = 0.0;
    std::uint64_t censored = 0;
};

/// One avoid-zero walk from 1 to level s, with its once-visited statistics.
struct HProcessRun {
    /// snapshots[s' - 1] = g(s') for s' = 1..s
    std::vector<std::int64_t> snapshots;
    /// once-visited sites <= s/2 at the hitting time of s
    std::int64_t restricted = 0;
    std::uint64_t steps = 0;
    bool censored = false;
};

/// Reuses the caller's tally across replicas.
HProcessRun run_h_process(std::int64_t s, RngStream& rng, VisitTally& tally,
                          std::uint64_t budget = kConditionedDefaultBudget);

/// Integer histogram of the g statistic over replicas; all tail estimates for
/// any threshold derive from it (common random numbers across thresholds).
struct GDistribution {
    std::int64_t s = 0;
    TailMode mode = TailMode::AtLevel;
    bool restricted = false;
    std::vector<std::uint64_t> histogram;
    std::uint64_t replicas = 0;
    std::uint64_t censored = 0;
};

/// restricted reads g~(s) (once-visited sites <= s/2); it is only defined in
/// AtLevel mode (ConfigError otherwise).
GDistribution sample_g_distribution(std::int64_t s, std::uint64_t replicas, TailMode mode, bool restricted,
                                    std::uint64_t seed, unsigned threads = 1,
                                    std::uint64_t budget = kConditionedDefaultBudget);
TailEstimate tail_from_distribution(const GDistribution& dist, std::int64_t threshold);

TailEstimate estimate_tail_g(std::int64_t s, std::int64_t threshold, std::uint64_t replicas, TailMode mode,
                             bool restricted, std::uint64_t seed, unsigned threads = 1,
                             std::uint64_t budget = kConditionedDefaultBudget);

/// Empirical E[binom(g(s), k)] over h-process runs, with its standard error.
struct BinomialMomentMc {
    double mean = 0.0;
    double stderr_ = 0.0;
};
BinomialMomentMc binomial_moment_mc(const GDistribution& dist, std::int64_t k);

/// How replicas are split over the height strata k = M..K.
struct Proposal {
    enum class Kind { LogUniform, Uniform, Custom };
    Kind kind = Kind::LogUniform;
    /// Custom masses for k = M..K in order; must be nonnegative with a
    /// positive sum (ConfigError otherwise).
    std::vector<double> masses;
};

/// Conditioned excursion with exact maximum k: ascent (AvoidZero from 1 to k)
/// then descent (CeilingStay(k) from k to 0).
struct ConditionedExcursion {
    std::int64_t once_max_ascent = 0;
    std::int64_t once_max_full = 0;
    Site max_site = 0;
    std::uint64_t length = 0;
    bool reached_zero = false;
    std::vector<Site> sites;
};
ConditionedExcursion sample_excursion_given_max(std::int64_t k, RngStream& rng, bool with_descent = true,
                                                bool retain_sites = false);

/// Stratified estimate of P(D >= M, max <= K), with truncation_bound = P(max > K) = 1/(K+1).
/// Each stratum samples only the ascent: the once-visited count cannot grow
/// after the first hit of k since every site of [1, k] is already visited.
TailEstimate estimate_excursion_tail(std::int64_t threshold, std::int64_t height_cap, const Proposal& proposal,
                                     std::uint64_t replicas, std::uint64_t seed, unsigned threads = 1);

/// Direct Monte Carlo of P(D >= M, max <= ceiling): a raw excursion from 1,
/// aborted as a miss once it rises above ceiling.
TailEstimate estimate_excursion_tail_direct(std::int64_t threshold, std::int64_t ceiling, std::uint64_t replicas,
                                            std::uint64_t seed, unsigned threads = 1);

/// Replica counts per stratum for the given proposal (at least 2 each).
std::vector<std::uint64_t> allocate_strata(std::int64_t threshold, std::int64_t height_cap, const Proposal& proposal,
                                           std::uint64_t replicas);

struct LadderSummary {
    std::int64_t k = 0;
    std::uint64_t replicas = 0;
    std::uint64_t reached = 0;
    std::uint64_t a1_decided = 0;
    std::uint64_t a1_success = 0;
    std::uint64_t censored = 0;
    /// y_counts[v] for v in [1, tail_cap); index 0 unused.
    std::vector<std::uint64_t> y_counts;
    std::uint64_t y_tail = 0;
    std::int64_t y_tail_cap = 0;
    std::vector<std::uint64_t> z_counts;
};
LadderSummary ladder_run(std::int64_t k, std::uint64_t replicas, std::uint64_t seed, unsigned threads = 1,
                         const LadderOptions& options = {});

struct GrowthPoint {
    std::int64_t j = 0;
    /// log(sigma_j)/log(j) per replica; +inf when censored.
    std::vector<double> log_sigma_ratio;
    std::vector<double> log_span_ratio;
    /// sigma_j and R_{sigma_j} per replica; -1 when censored.
    std::vector<std::int64_t> sigma;
    std::vector<std::int64_t> span;
    std::uint64_t censored = 0;
    double median_sigma = 0.0;
    double q25_sigma = 0.0;
    double q75_sigma = 0.0;
    double median_span = 0.0;
    double q25_span = 0.0;
    double q75_span = 0.0;
};

/// Medians over replicas of log sigma_j / log j and log R_{sigma_j} / log j at
/// each checkpoint j (checkpoints must lie in [2, j_max]).
std::vector<GrowthPoint> sigma_growth(std::int64_t j_max, const std::vector<std::int64_t>& checkpoints,
                                      std::uint64_t replicas, std::uint64_t budget, std::uint64_t seed,
                                      unsigned threads = 1);

struct ScalingReport {
    enum class Status { Satisfied, Violated, Inconclusive, NotApplicable };
    std::int64_t n1 = 0;
    std::int64_t n2 = 0;
    std::int64_t threshold = 0;
    std::uint64_t replicas = 0;
    std::uint64_t hits_n1 = 0;
    std::uint64_t hits_n2 = 0;
    double factor = 0.0;
    double lhs_hat = 0.0;
    double lhs_stderr = 0.0;
    double rhs_p_hat = 0.0;
    double rhs_bound = 0.0;
    double margin = 0.0;
    double margin_stderr = 0.0;
    std::uint64_t censored = 0;
    Status status = Status::Inconclusive;
};
std::string to_string(ScalingReport::Status status);

/// (N2 - N1) / (8 N1 (log N1 + 1)).
double scaling_factor(std::int64_t n1, std::int64_t n2);

/// Checks P(max_{s<=N2} g(s) >= M) >= factor * P(max_{s<=N1} g(s) >= M) with
/// both sides read from the same runs to level N2.
ScalingReport check_scaling_inequality(std::int64_t n1, std::int64_t n2, std::int64_t threshold,
                                       std::uint64_t replicas, std::uint64_t seed, unsigned threads = 1,
                                       std::uint64_t budget = kConditionedDefaultBudget);

struct ExponentPoint {
    double x = 0.0;
    double p_hat = 0.0;
    double stderr_ = 0.0;
};

struct ExponentFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double residual = 0.0;
    bool weighted = false;
};

/// Weighted least squares of log p_hat on x with weights 1/se(log p_hat)^2,
/// se(log p_hat) = stderr / p_hat. When every stderr is zero the fit is
/// unweighted. Refuses (DomainError) fewer than two points or any p_hat <= 0.
ExponentFit fit_exponent(const std::vector<ExponentPoint>& points, double confidence = 0.95);

} // namespace srwlt
