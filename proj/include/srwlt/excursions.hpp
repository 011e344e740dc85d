#pragma once

#include "srwlt/localtime.hpp"
#include "srwlt/rng.hpp"
#include "srwlt/walk.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace srwlt {

/// One outward excursion of a walk started at 0.
///
/// tau: first exit from the interval covered before it; sigma: first return
/// into that interval (equivalently, to the anchor S_{tau-1}); next_tau: the
/// following exit. once_max is D_i, the largest number of sites visited
/// exactly once by the segment S_tau..S_m over tau <= m <= sigma-1.
struct ExcursionFrame {
    std::uint64_t index = 0;
    std::uint64_t tau = 0;
    std::optional<std::uint64_t> sigma;
    std::optional<std::uint64_t> next_tau;
    Site anchor = 0;
    /// Extremes at sigma; at the end of the path for a censored frame.
    Site n_sigma = 0;
    Site m_sigma = 0;
    /// Growth of the span over this excursion, R_sigma_i - R_sigma_{i-1}.
    std::int64_t height_gain = 0;
    std::int64_t once_max = 0;
    /// The path ended before sigma; height_gain and once_max are partial.
    bool censored = false;
    /// The interval and anchor characterisations of sigma disagreed.
    bool sigma_mismatch = false;
};

/// Offline decomposition from the stopping-time definitions. The path must
/// start at 0. The final unfinished excursion is kept as a censored frame.
std::vector<ExcursionFrame> decompose(std::span<const Site> sites);
std::vector<ExcursionFrame> decompose(const PathSummary& path);

/// Streaming decomposition tracking only the anchor and extremes of the open
/// frame (plus an optional per-excursion tally for once_max).
class OnlineDecomposer {
public:
    using FrameCallback = std::function<void(const ExcursionFrame&)>;

    explicit OnlineDecomposer(bool track_once_max = true, bool retain_frames = true,
                              FrameCallback on_close = nullptr);

    void push(Site site) {
        if (!started_) {
            start(site);
            return;
        }
        ++t_;
        if (!outward_) {
            if (site < n_ || site > m_) open_frame(site);
            return;
        }
        if (site == open_.anchor) {
            close_frame();
            return;
        }
        if (site < n_) n_ = site;
        if (site > m_) m_ = site;
        if (track_once_max_) {
            tally_.record_step(site);
            if (tally_.once_count() > open_.once_max) open_.once_max = tally_.once_count();
        }
    }

    /// Frames closed so far (only when retain_frames).
    const std::vector<ExcursionFrame>& frames() const noexcept { return frames_; }
    std::uint64_t closed_count() const noexcept { return closed_; }
    std::uint64_t time() const noexcept { return t_; }
    std::int64_t span() const noexcept { return m_ - n_; }
    bool in_excursion() const noexcept { return outward_; }

    /// The open frame, marked censored, if the walk is mid-excursion.
    std::optional<ExcursionFrame> open_frame_snapshot() const;

    /// Closed frames plus the censored open frame, matching decompose().
    std::vector<ExcursionFrame> finish() const;

private:
    void start(Site site);
    void open_frame(Site site);
    void close_frame();

    bool track_once_max_;
    bool retain_frames_;
    FrameCallback on_close_;
    bool started_ = false;
    bool outward_ = false;
    std::uint64_t t_ = 0;
    Site last_ = 0;
    Site n_ = 0;
    Site m_ = 0;
    std::int64_t span_at_last_sigma_ = 0;
    std::uint64_t closed_ = 0;
    ExcursionFrame open_;
    VisitTally tally_;
    std::vector<ExcursionFrame> frames_;
};

/// D for one excursion T_1 = 1, ..., T_sigma = 0: the max over 1 <= m <= sigma-1
/// of the once-visited count of T_1..T_m. Needs at least two sites.
std::int64_t excursion_once_max(std::span<const Site> excursion);

/// Counts instants n with sigma_i <= n <= tau_{i+1} - 1 at which some
/// once-visited site of S_0..S_n differs from both extremes N_{sigma_i} and
/// M_{sigma_i}. The tally type is a parameter so tests can inject a faulty one.
template <class Tally = VisitTally>
std::uint64_t check_containment(std::span<const Site> sites) {
    if (sites.empty()) return 0;
    if (sites.front() != 0) throw DomainError("check_containment: path must start at 0");
    Tally tally;
    std::uint64_t violations = 0;
    Site n = sites[0];
    Site m = sites[0];
    bool outward = false;
    bool seen_sigma = false;
    Site anchor = 0;
    tally.record_step(sites[0]);
    for (std::size_t t = 1; t < sites.size(); ++t) {
        const Site s = sites[t];
        tally.record_step(s);
        if (!outward) {
            if (s < n || s > m) {
                outward = true;
                anchor = sites[t - 1];
                if (s < n) n = s;
                if (s > m) m = s;
                continue;
            }
        } else {
            if (s != anchor) {
                if (s < n) n = s;
                if (s > m) m = s;
                continue;
            }
            outward = false;
            seen_sigma = true;
        }
        if (!seen_sigma) continue;
        // inside a window [sigma_i, tau_{i+1} - 1]
        std::int64_t at_extremes = 0;
        if (tally.count(n) == 1) ++at_extremes;
        if (m != n && tally.count(m) == 1) ++at_extremes;
        if (static_cast<std::int64_t>(tally.once_count()) != at_extremes) ++violations;
    }
    return violations;
}

std::uint64_t check_containment(const PathSummary& path);

struct LadderOptions {
    /// Total step budget per replica.
    std::uint64_t budget = kConditionedDefaultBudget;
    /// Segments reaching this far above their base are recorded as a tail
    /// sample (Y >= cap) and end collection; 0 means 4K.
    std::int64_t y_tail_cap = 0;
    /// Ladder segments collected per replica.
    std::uint32_t max_segments = 8;
};

/// One replica of the ladder construction on an excursion T from 1.
///
/// The excursion either returns to 0 before K (reached_k = false) or hits K at
/// beta_0. From there the walk continues until A1 is decided (2K before
/// floor(K/2)) and ladder collection ends. Segment i starts at beta_i, the
/// first passage one above the running max, and ends at gamma_i, the return to
/// the level just below T_{beta_i}. Y_i is the running-max increment and Z_i
/// the max once-visited count over the segment instants before gamma_i.
struct LadderRecord {
    bool reached_k = false;
    std::optional<bool> a1;
    std::vector<std::int64_t> y_samples;
    /// Number of segments recorded as Y >= y_tail_cap (not in y_samples).
    std::uint64_t y_tail = 0;
    std::vector<std::int64_t> z_samples;
    bool censored = false;
    std::uint64_t steps = 0;
};

LadderRecord ladder_experiment(std::int64_t k, RngStream& rng, const LadderOptions& options = {});

} // namespace srwlt
