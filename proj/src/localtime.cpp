#include "srwlt/localtime.hpp"

#include <algorithm>
#include <string>

namespace srwlt {

VisitTally::VisitTally(std::uint32_t k_max) : k_max_(k_max) {
    if (k_max_ < 1) throw DomainError("VisitTally: k_max must be at least 1");
    hist_.assign(static_cast<std::size_t>(k_max_) + 1, 0);
}

void VisitTally::reset() {
    if (total_visits_ != 0) {
        std::fill(counts_.begin() + (min_site_ - origin_), counts_.begin() + (max_site_ - origin_) + 1, 0);
    }
    std::fill(hist_.begin(), hist_.end(), 0);
    overflow_sites_ = 0;
    overflow_visits_ = 0;
    total_visits_ = 0;
    min_site_ = max_site_ = last_site_ = 0;
}

void VisitTally::throw_non_adjacent(Site site) const {
    throw ContractViolation("record_step: site " + std::to_string(site) + " is not adjacent to previous site " +
                            std::to_string(last_site_));
}

void VisitTally::first_visit(Site site) {
    if (counts_.empty()) counts_.assign(64, 0);
    // keep the storage if the start falls inside it (reset() zeroed the used part)
    if (site < origin_ || site >= origin_ + static_cast<Site>(counts_.size())) {
        origin_ = site - static_cast<Site>(counts_.size() / 2);
    }
    min_site_ = max_site_ = site;
}

void VisitTally::extend_to(Site site) {
    while (site < origin_ || site >= origin_ + static_cast<Site>(counts_.size())) {
        const std::size_t old_size = counts_.size();
        const std::size_t new_size = old_size * 2;
        if (site < origin_) {
            // grow on the left: shift existing contents up by old_size
            std::vector<std::uint64_t> grown(new_size, 0);
            std::copy(counts_.begin(), counts_.end(), grown.begin() + static_cast<std::ptrdiff_t>(old_size));
            counts_.swap(grown);
            origin_ -= static_cast<Site>(old_size);
        } else {
            counts_.resize(new_size, 0);
        }
    }
    min_site_ = std::min(min_site_, site);
    max_site_ = std::max(max_site_, site);
}

std::uint64_t VisitTally::g(std::uint64_t k) const {
    if (k == 0) return 0;
    if (k <= k_max_) return hist_[k];
    std::uint64_t n = 0;
    if (total_visits_ == 0) return 0;
    for (Site s = min_site_; s <= max_site_; ++s) n += (count(s) == k) ? 1 : 0;
    return n;
}

std::vector<Site> VisitTally::once_visited_sites() const {
    std::vector<Site> out;
    if (total_visits_ == 0) return out;
    for (Site s = min_site_; s <= max_site_; ++s) {
        if (count(s) == 1) out.push_back(s);
    }
    return out;
}

std::int64_t VisitTally::restricted_once_count(Site bound) const {
    if (total_visits_ == 0 || bound < min_site_) return 0;
    const Site hi = std::min(bound, max_site_);
    std::int64_t n = 0;
    for (Site s = min_site_; s <= hi; ++s) n += (count(s) == 1) ? 1 : 0;
    return n;
}

} // namespace srwlt
