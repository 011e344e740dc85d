#pragma once

#include "srwlt/error.hpp"
#include "srwlt/walk.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace srwlt {

/// Streaming local-time accumulator for a nearest-neighbour path.
///
/// Visit counts live in a contiguous array indexed by site - origin, grown
/// geometrically on either side. The count-of-counts histogram holds g_k for
/// k <= k_max; sites with more visits go to an overflow bucket that keeps both
/// the site count and their visit total, so sum_k k*g_k and sum_k g_k stay
/// exact.
class VisitTally {
public:
    static constexpr std::uint32_t kDefaultKMax = 64;

    explicit VisitTally(std::uint32_t k_max = kDefaultKMax);

    /// Throws ContractViolation when site is not adjacent to the last one.
    void record_step(Site site) {
        if (total_visits_ != 0) {
            const Site d = site - last_site_;
            if (d != 1 && d != -1) throw_non_adjacent(site);
        }
        record_unchecked(site);
    }

    void reset();

    bool empty() const noexcept { return total_visits_ == 0; }
    std::uint64_t total_visits() const noexcept { return total_visits_; }
    std::int64_t once_count() const noexcept { return static_cast<std::int64_t>(hist_[1]); }
    Site min_site() const noexcept { return min_site_; }
    Site max_site() const noexcept { return max_site_; }
    Site last_site() const noexcept { return last_site_; }
    std::uint32_t k_max() const noexcept { return k_max_; }

    /// Number of visits to site (0 outside the visited interval).
    std::uint64_t count(Site site) const noexcept {
        if (total_visits_ == 0 || site < min_site_ || site > max_site_) return 0;
        return counts_[static_cast<std::size_t>(site - origin_)];
    }

    /// g_k; scans the counts when k exceeds k_max.
    std::uint64_t g(std::uint64_t k) const;

    /// Histogram slots 0..k_max (slot 0 unused and always 0).
    const std::vector<std::uint64_t>& count_of_counts() const noexcept { return hist_; }
    std::uint64_t overflow_sites() const noexcept { return overflow_sites_; }
    std::uint64_t overflow_visits() const noexcept { return overflow_visits_; }

    /// Sites visited exactly once, ascending, found by scanning the counts.
    std::vector<Site> once_visited_sites() const;

    /// Once-visited sites s with s <= bound.
    std::int64_t restricted_once_count(Site bound) const;

protected:
    void record_unchecked(Site site) {
        if (total_visits_ == 0) {
            first_visit(site);
        } else {
            if (site < min_site_ || site > max_site_) extend_to(site);
        }
        auto& c = counts_[static_cast<std::size_t>(site - origin_)];
        move_multiplicity(c, c + 1);
        ++c;
        ++total_visits_;
        last_site_ = site;
    }

    void move_multiplicity(std::uint64_t from, std::uint64_t to) {
        if (from != 0) {
            if (from <= k_max_) {
                --hist_[from];
            } else {
                --overflow_sites_;
                overflow_visits_ -= from;
            }
        }
        if (to <= k_max_) {
            ++hist_[to];
        } else {
            ++overflow_sites_;
            overflow_visits_ += to;
        }
    }

private:
    [[noreturn]] void throw_non_adjacent(Site site) const;
    void first_visit(Site site);
    void extend_to(Site site);

    std::uint32_t k_max_;
    std::vector<std::uint64_t> counts_;
    Site origin_ = 0;
    std::vector<std::uint64_t> hist_;
    std::uint64_t overflow_sites_ = 0;
    std::uint64_t overflow_visits_ = 0;
    std::uint64_t total_visits_ = 0;
    Site min_site_ = 0;
    Site max_site_ = 0;
    Site last_site_ = 0;
};

/// Running statistics over the once-visited count, observed after every step.
///
/// record-level snapshots: once_count at the first arrival at each new maximum
/// level (the first recorded site counts as one). For an AvoidZero walk from 1
/// the snapshot at level s is g(s), the once-visited count at the hitting time
/// of s. running_max_over_time is the max over all instants and differs from
/// the snapshots in general.
class OnceTrackers {
public:
    OnceTrackers() = default;
    explicit OnceTrackers(std::optional<Site> restricted_bound) : restricted_bound_(restricted_bound) {}

    void observe_instant(const VisitTally& tally, Site current_site) {
        const std::int64_t once = tally.once_count();
        if (once > running_max_) running_max_ = once;
        if (restricted_bound_ && current_site <= *restricted_bound_) {
            const auto c = tally.count(current_site);
            if (c == 1) {
                ++restricted_once_;
            } else if (c == 2) {
                --restricted_once_;
            }
        }
        if (snapshots_.empty()) {
            base_level_ = current_site;
            snapshots_.push_back(once);
        } else if (current_site == base_level_ + static_cast<Site>(snapshots_.size())) {
            snapshots_.push_back(once);
        }
    }

    void reset() {
        running_max_ = 0;
        restricted_once_ = 0;
        snapshots_.clear();
        base_level_ = 0;
    }

    std::int64_t running_max_over_time() const noexcept { return running_max_; }

    /// Lowest level carrying a snapshot (the first observed site).
    Site base_level() const noexcept { return base_level_; }
    /// Highest level carrying a snapshot.
    Site top_level() const noexcept { return base_level_ + static_cast<Site>(snapshots_.size()) - 1; }
    /// once_count at first arrival at level; nullopt if level never was a new maximum.
    std::optional<std::int64_t> snapshot(Site level) const noexcept {
        if (snapshots_.empty() || level < base_level_ || level > top_level()) return std::nullopt;
        return snapshots_[static_cast<std::size_t>(level - base_level_)];
    }
    const std::vector<std::int64_t>& snapshots() const noexcept { return snapshots_; }

    const std::optional<Site>& restricted_bound() const noexcept { return restricted_bound_; }
    /// Current number of once-visited sites <= restricted_bound (0 when unset).
    std::int64_t restricted_once() const noexcept { return restricted_once_; }

private:
    std::optional<Site> restricted_bound_;
    std::int64_t running_max_ = 0;
    std::int64_t restricted_once_ = 0;
    Site base_level_ = 0;
    std::vector<std::int64_t> snapshots_;
};

} // namespace srwlt
