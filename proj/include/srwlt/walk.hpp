#pragma once

#include "srwlt/error.hpp"
#include "srwlt/rational.hpp"
#include "srwlt/rng.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace srwlt {

using Site = std::int64_t;

enum class LawKind { SimpleSymmetric, AvoidZero, CeilingStay };

/// Nearest-neighbour transition rule.
///
/// - SimpleSymmetric: fair coin on all of Z.
/// - AvoidZero: the walk conditioned never to hit 0 (Doob transform with
///   h(x) = x), defined for x >= 1: p_up = (x+1)/(2x), p_down = (x-1)/(2x).
/// - CeilingStay(c): the walk from c conditioned to hit 0 before c+1
///   (h(x) = c+1-x), defined for 1 <= x <= c:
///   p_up = (c-x)/(2(c+1-x)), p_down = (c+2-x)/(2(c+1-x)).
class WalkLaw {
public:
    static WalkLaw simple_symmetric() { return WalkLaw(LawKind::SimpleSymmetric, 0); }
    static WalkLaw avoid_zero() { return WalkLaw(LawKind::AvoidZero, 0); }
    static WalkLaw ceiling_stay(Site ceiling);

    LawKind kind() const noexcept { return kind_; }
    Site ceiling() const noexcept { return ceiling_; }
    bool conditioned() const noexcept { return kind_ != LawKind::SimpleSymmetric; }
    bool in_domain(Site x) const noexcept;
    std::string name() const;

    friend bool operator==(const WalkLaw&, const WalkLaw&) = default;

private:
    WalkLaw(LawKind kind, Site ceiling) : kind_(kind), ceiling_(ceiling) {}

    LawKind kind_;
    Site ceiling_;
};

struct StepProbabilities {
    double p_down;
    double p_up;
};

struct ExactStepProbabilities {
    Rational p_down;
    Rational p_up;
};

/// Throws DomainError when x is outside the law's domain.
ExactStepProbabilities step_probabilities_exact(const WalkLaw& law, Site x);

/// Binary64 rounding of the exact pair (each component correctly rounded).
StepProbabilities step_probabilities(const WalkLaw& law, Site x);

/// Draws +1/-1 increments. SimpleSymmetric consumes one random bit per step;
/// the conditioned laws compare one 53-bit uniform against p_up(x), taken
/// from a table of correctly rounded binary64 thresholds built on first use.
/// The resulting bias per step is at most 2^-53.
class Stepper {
public:
    explicit Stepper(WalkLaw law);

    const WalkLaw& law() const noexcept { return law_; }

    /// Caller guarantees x is in the domain.
    int step(Site x, RngStream& rng) {
        if (law_.kind() == LawKind::SimpleSymmetric) return rng.bit() ? 1 : -1;
        const auto idx = static_cast<std::size_t>(x);
        if (idx >= up_threshold_.size()) grow(idx);
        return rng.uniform() < up_threshold_[idx] ? 1 : -1;
    }

private:
    void grow(std::size_t idx);

    WalkLaw law_;
    std::vector<double> up_threshold_;
};

/// Composable stop condition.
///
/// HitLevel(l) fires at any instant (including time 0) with S = l.
/// ReturnToLevel(l) fires at instants t > 0 with S = l.
/// StepBudget(m) fires once m steps have been recorded and nothing else fired.
/// FirstOf fires on its earliest constituent; simultaneous firings resolve in
/// list order.
class StopRule {
public:
    enum class Kind { HitLevel, ReturnToLevel, StepBudget, FirstOf };

    static StopRule hit_level(Site level) { return StopRule(Kind::HitLevel, level, 0, {}); }
    static StopRule return_to_level(Site level) { return StopRule(Kind::ReturnToLevel, level, 0, {}); }
    static StopRule step_budget(std::uint64_t max_steps) { return StopRule(Kind::StepBudget, 0, max_steps, {}); }
    static StopRule first_of(std::vector<StopRule> rules) { return StopRule(Kind::FirstOf, 0, 0, std::move(rules)); }

    Kind kind() const noexcept { return kind_; }
    Site level() const noexcept { return level_; }
    std::uint64_t max_steps() const noexcept { return max_steps_; }
    const std::vector<StopRule>& rules() const noexcept { return rules_; }

private:
    StopRule(Kind kind, Site level, std::uint64_t max_steps, std::vector<StopRule> rules)
        : kind_(kind), level_(level), max_steps_(max_steps), rules_(std::move(rules)) {}

    Kind kind_;
    Site level_;
    std::uint64_t max_steps_;
    std::vector<StopRule> rules_;
};

inline constexpr std::uint64_t kConditionedDefaultBudget = 1'000'000'000ULL;

enum class StopCause { HitLevel, ReturnToLevel, StepBudget };

std::string to_string(StopCause cause);

struct PathSummary {
    Site start = 0;
    bool steps_retained = false;
    std::vector<std::int8_t> steps;
    Site final_position = 0;
    StopCause stop_cause = StopCause::StepBudget;
    /// Level of the firing HitLevel/ReturnToLevel rule; unset on budget stops.
    std::optional<Site> stop_level;
    std::uint64_t length = 0;

    /// Sites S_0..S_length; requires retained steps.
    std::vector<Site> sites() const;
};

/// Flattened form of a StopRule, evaluated once per instant.
class CompiledStop {
public:
    /// Applies the budget defaults: conditioned laws get 10^9 steps when no
    /// StepBudget is present; SimpleSymmetric walks must either carry an
    /// explicit budget or be bracketed by stop levels on both sides of the
    /// start (ConfigError otherwise).
    CompiledStop(const StopRule& rule, const WalkLaw& law, Site start);

    /// Returns the firing cause at time t with position pos, if any.
    std::optional<StopCause> check(std::uint64_t t, Site pos, Site& level_out) const {
        for (const auto& c : levels_) {
            if (pos == c.level && (c.cause == StopCause::HitLevel || t > 0)) {
                level_out = c.level;
                return c.cause;
            }
        }
        if (t >= budget_) return StopCause::StepBudget;
        return std::nullopt;
    }

    std::uint64_t budget() const noexcept { return budget_; }

private:
    struct Level {
        StopCause cause;
        Site level;
    };
    void flatten(const StopRule& rule, bool& has_budget);

    std::vector<Level> levels_;
    std::uint64_t budget_ = UINT64_MAX;
};

/// Generic streaming driver: on_site is called for S_0 and every later site.
template <class OnSite>
PathSummary simulate_with(const WalkLaw& law, Site start, const StopRule& stop, RngStream& rng,
                          OnSite&& on_site, bool retain_steps = false) {
    if (!law.in_domain(start)) {
        throw DomainError("simulate: start " + std::to_string(start) + " outside domain of " + law.name());
    }
    const CompiledStop compiled(stop, law, start);
    Stepper stepper(law);

    PathSummary out;
    out.start = start;
    out.steps_retained = retain_steps;

    Site pos = start;
    std::uint64_t t = 0;
    Site level = 0;
    on_site(pos);
    for (;;) {
        if (auto cause = compiled.check(t, pos, level)) {
            out.stop_cause = *cause;
            if (*cause != StopCause::StepBudget) out.stop_level = level;
            break;
        }
        if (!law.in_domain(pos)) {
            throw DomainError("simulate: walk reached " + std::to_string(pos) + " outside domain of " +
                              law.name() + " without a stop rule firing");
        }
        const int inc = stepper.step(pos, rng);
        pos += inc;
        ++t;
        if (retain_steps) out.steps.push_back(static_cast<std::int8_t>(inc));
        on_site(pos);
    }
    out.final_position = pos;
    out.length = t;
    return out;
}

using SiteObserver = std::function<void(Site)>;

PathSummary simulate(const WalkLaw& law, Site start, const StopRule& stop, RngStream& rng,
                     std::span<const SiteObserver> observers = {}, bool retain_steps = false);

} // namespace srwlt
