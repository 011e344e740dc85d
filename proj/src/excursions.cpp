#include "srwlt/excursions.hpp"

#include <algorithm>

namespace srwlt {

namespace {

// Max once-visited count of sites[first..m] over first <= m <= last.
std::int64_t segment_once_max(std::span<const Site> sites, std::size_t first, std::size_t last, VisitTally& tally) {
    tally.reset();
    std::int64_t best = 0;
    for (std::size_t m = first; m <= last; ++m) {
        tally.record_step(sites[m]);
        best = std::max(best, tally.once_count());
    }
    return best;
}

} // namespace

std::vector<ExcursionFrame> decompose(std::span<const Site> sites) {
    std::vector<ExcursionFrame> frames;
    if (sites.empty()) return frames;
    if (sites.front() != 0) throw DomainError("decompose: path must start at 0");
    const std::size_t n = sites.size();
    for (std::size_t t = 1; t < n; ++t) {
        if (sites[t] - sites[t - 1] != 1 && sites[t] - sites[t - 1] != -1) {
            throw ContractViolation("decompose: path is not nearest-neighbour at time " + std::to_string(t));
        }
    }

    std::vector<Site> lo(n);
    std::vector<Site> hi(n);
    lo[0] = hi[0] = sites[0];
    for (std::size_t t = 1; t < n; ++t) {
        lo[t] = std::min(lo[t - 1], sites[t]);
        hi[t] = std::max(hi[t - 1], sites[t]);
    }

    VisitTally tally;
    std::int64_t prev_span = 0;
    std::size_t tau = 1;
    std::uint64_t index = 1;
    while (tau < n) {
        ExcursionFrame f;
        f.index = index;
        f.tau = tau;
        f.anchor = sites[tau - 1];
        const Site a = lo[tau - 1];
        const Site b = hi[tau - 1];

        std::optional<std::size_t> sigma;
        std::optional<std::size_t> sigma_anchor;
        for (std::size_t k = tau + 1; k < n && !(sigma && sigma_anchor); ++k) {
            if (!sigma && sites[k] >= a && sites[k] <= b) sigma = k;
            if (!sigma_anchor && sites[k] == f.anchor) sigma_anchor = k;
        }
        f.sigma_mismatch = sigma != sigma_anchor;

        if (!sigma) {
            f.censored = true;
            f.n_sigma = lo[n - 1];
            f.m_sigma = hi[n - 1];
            f.height_gain = (f.m_sigma - f.n_sigma) - prev_span;
            f.once_max = segment_once_max(sites, tau, n - 1, tally);
            frames.push_back(f);
            break;
        }

        f.sigma = *sigma;
        f.n_sigma = lo[*sigma];
        f.m_sigma = hi[*sigma];
        f.height_gain = (f.m_sigma - f.n_sigma) - prev_span;
        prev_span = f.m_sigma - f.n_sigma;
        f.once_max = segment_once_max(sites, tau, *sigma - 1, tally);

        std::optional<std::size_t> next;
        for (std::size_t k = *sigma + 1; k < n; ++k) {
            if (sites[k] < f.n_sigma || sites[k] > f.m_sigma) {
                next = k;
                break;
            }
        }
        if (next) f.next_tau = *next;
        frames.push_back(f);
        if (!next) break;
        tau = *next;
        ++index;
    }
    return frames;
}

std::vector<ExcursionFrame> decompose(const PathSummary& path) {
    const auto s = path.sites();
    return decompose(std::span<const Site>(s));
}

OnlineDecomposer::OnlineDecomposer(bool track_once_max, bool retain_frames, FrameCallback on_close)
    : track_once_max_(track_once_max), retain_frames_(retain_frames), on_close_(std::move(on_close)) {}

void OnlineDecomposer::start(Site site) {
    if (site != 0) throw DomainError("OnlineDecomposer: path must start at 0");
    started_ = true;
    t_ = 0;
    n_ = m_ = last_ = site;
}

void OnlineDecomposer::open_frame(Site site) {
    if (retain_frames_ && !frames_.empty() && !frames_.back().next_tau) frames_.back().next_tau = t_;
    open_ = ExcursionFrame{};
    open_.index = closed_ + 1;
    open_.tau = t_;
    open_.anchor = site < n_ ? n_ : m_;
    outward_ = true;
    if (site < n_) n_ = site;
    if (site > m_) m_ = site;
    if (track_once_max_) {
        tally_.reset();
        tally_.record_step(site);
        open_.once_max = tally_.once_count();
    }
}

void OnlineDecomposer::close_frame() {
    open_.sigma = t_;
    open_.n_sigma = n_;
    open_.m_sigma = m_;
    open_.height_gain = (m_ - n_) - span_at_last_sigma_;
    span_at_last_sigma_ = m_ - n_;
    outward_ = false;
    ++closed_;
    if (retain_frames_) frames_.push_back(open_);
    if (on_close_) on_close_(open_);
}

std::optional<ExcursionFrame> OnlineDecomposer::open_frame_snapshot() const {
    if (!outward_) return std::nullopt;
    ExcursionFrame f = open_;
    f.censored = true;
    f.n_sigma = n_;
    f.m_sigma = m_;
    f.height_gain = (m_ - n_) - span_at_last_sigma_;
    return f;
}

std::vector<ExcursionFrame> OnlineDecomposer::finish() const {
    std::vector<ExcursionFrame> out = frames_;
    if (auto open = open_frame_snapshot()) out.push_back(*open);
    return out;
}

std::int64_t excursion_once_max(std::span<const Site> excursion) {
    if (excursion.size() < 2) throw ContractViolation("excursion_once_max: needs at least T_1 and T_sigma");
    VisitTally tally;
    return segment_once_max(excursion, 0, excursion.size() - 2, tally);
}

std::uint64_t check_containment(const PathSummary& path) {
    const auto s = path.sites();
    return check_containment<VisitTally>(std::span<const Site>(s));
}

LadderRecord ladder_experiment(std::int64_t k, RngStream& rng, const LadderOptions& options) {
    if (k < 2) throw DomainError("ladder_experiment: K must be at least 2");
    const std::int64_t tail_cap = options.y_tail_cap > 0 ? options.y_tail_cap : 4 * k;
    LadderRecord rec;

    Site pos = 1;
    std::uint64_t steps = 0;
    auto step = [&] {
        pos += rng.bit() ? 1 : -1;
        ++steps;
    };

    while (pos != 0 && pos != k) {
        if (steps >= options.budget) {
            rec.censored = true;
            rec.steps = steps;
            return rec;
        }
        step();
    }
    if (pos == 0) {
        rec.steps = steps;
        return rec;
    }
    rec.reached_k = true;

    const Site fail_level = k / 2;
    const Site succ_level = 2 * k;
    Site running_max = k;
    bool collecting = options.max_segments > 0;
    bool in_segment = false;
    Site seg_base = 0;
    Site seg_start_max = 0;
    std::int64_t seg_once_max = 0;
    VisitTally tally;

    while (!rec.a1 || collecting) {
        if (steps >= options.budget) {
            rec.censored = true;
            break;
        }
        step();
        if (!rec.a1) {
            if (pos <= fail_level) {
                rec.a1 = false;
            } else if (pos == succ_level) {
                rec.a1 = true;
            }
        }
        if (!collecting) continue;
        if (pos == 0) {
            collecting = false;
            continue;
        }
        if (!in_segment) {
            if (pos == running_max + 1) {
                in_segment = true;
                seg_base = running_max;
                seg_start_max = running_max;
                running_max = pos;
                tally.reset();
                tally.record_step(pos);
                seg_once_max = tally.once_count();
            }
            continue;
        }
        if (pos == seg_base) {
            rec.y_samples.push_back(running_max - seg_start_max);
            rec.z_samples.push_back(seg_once_max);
            in_segment = false;
            if (rec.y_samples.size() >= options.max_segments) collecting = false;
            continue;
        }
        if (pos > running_max) running_max = pos;
        if (running_max - seg_start_max >= tail_cap) {
            ++rec.y_tail;
            collecting = false;
            continue;
        }
        tally.record_step(pos);
        if (tally.once_count() > seg_once_max) seg_once_max = tally.once_count();
    }
    rec.steps = steps;
    return rec;
}

} // namespace srwlt
