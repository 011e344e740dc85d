#include "srwlt/walk.hpp"

#include <algorithm>

namespace srwlt {

WalkLaw WalkLaw::ceiling_stay(Site ceiling) {
    if (ceiling < 1) throw DomainError("CeilingStay: ceiling must be positive, got " + std::to_string(ceiling));
    return WalkLaw(LawKind::CeilingStay, ceiling);
}

bool WalkLaw::in_domain(Site x) const noexcept {
    switch (kind_) {
    case LawKind::SimpleSymmetric: return true;
    case LawKind::AvoidZero: return x >= 1;
    case LawKind::CeilingStay: return x >= 1 && x <= ceiling_;
    }
    return false;
}

std::string WalkLaw::name() const {
    switch (kind_) {
    case LawKind::SimpleSymmetric: return "SimpleSymmetric";
    case LawKind::AvoidZero: return "AvoidZero";
    case LawKind::CeilingStay: return "CeilingStay(" + std::to_string(ceiling_) + ")";
    }
    return "?";
}

ExactStepProbabilities step_probabilities_exact(const WalkLaw& law, Site x) {
    if (!law.in_domain(x)) {
        throw DomainError("step_probabilities: x = " + std::to_string(x) + " outside domain of " + law.name());
    }
    switch (law.kind()) {
    case LawKind::SimpleSymmetric: return {Rational(1, 2), Rational(1, 2)};
    case LawKind::AvoidZero: return {Rational(x - 1, 2 * x), Rational(x + 1, 2 * x)};
    case LawKind::CeilingStay: {
        const Site c = law.ceiling();
        const Site h = c + 1 - x;
        return {Rational(c + 2 - x, 2 * h), Rational(c - x, 2 * h)};
    }
    }
    throw DomainError("step_probabilities: unknown law");
}

StepProbabilities step_probabilities(const WalkLaw& law, Site x) {
    const auto exact = step_probabilities_exact(law, x);
    return {ExactValue::to_double(exact.p_down), ExactValue::to_double(exact.p_up)};
}

Stepper::Stepper(WalkLaw law) : law_(law) {
    if (law_.kind() == LawKind::CeilingStay) grow(static_cast<std::size_t>(law_.ceiling()));
}

void Stepper::grow(std::size_t idx) {
    std::size_t target = std::max<std::size_t>(idx + 1, 2 * up_threshold_.size());
    if (law_.kind() == LawKind::CeilingStay) target = static_cast<std::size_t>(law_.ceiling()) + 1;
    if (idx >= target) throw DomainError("Stepper: x = " + std::to_string(idx) + " outside domain of " + law_.name());
    const std::size_t first = up_threshold_.size();
    up_threshold_.resize(target, 0.0);
    for (std::size_t i = std::max<std::size_t>(first, 1); i < target; ++i) {
        const auto x = static_cast<double>(i);
        if (law_.kind() == LawKind::AvoidZero) {
            // both operands exact, so the quotient is correctly rounded
            up_threshold_[i] = (x + 1.0) / (2.0 * x);
        } else {
            const auto c = static_cast<double>(law_.ceiling());
            up_threshold_[i] = (c - x) / (2.0 * (c + 1.0 - x));
        }
    }
}

std::string to_string(StopCause cause) {
    switch (cause) {
    case StopCause::HitLevel: return "hit_level";
    case StopCause::ReturnToLevel: return "return_to_level";
    case StopCause::StepBudget: return "step_budget";
    }
    return "?";
}

std::vector<Site> PathSummary::sites() const {
    if (!steps_retained) throw ContractViolation("PathSummary::sites: steps were not retained");
    std::vector<Site> out;
    out.reserve(steps.size() + 1);
    Site pos = start;
    out.push_back(pos);
    for (auto inc : steps) {
        pos += inc;
        out.push_back(pos);
    }
    return out;
}

CompiledStop::CompiledStop(const StopRule& rule, const WalkLaw& law, Site start) {
    bool has_budget = false;
    flatten(rule, has_budget);
    if (has_budget) return;
    if (law.conditioned()) {
        budget_ = kConditionedDefaultBudget;
        return;
    }
    bool below = false;
    bool above = false;
    for (const auto& l : levels_) {
        if (l.cause == StopCause::HitLevel && l.level == start) return;
        below = below || l.level < start;
        above = above || l.level > start;
    }
    if (!(below && above)) {
        throw ConfigError("SimpleSymmetric walk needs an explicit StepBudget unless stop levels bracket the start");
    }
}

void CompiledStop::flatten(const StopRule& rule, bool& has_budget) {
    switch (rule.kind()) {
    case StopRule::Kind::HitLevel: levels_.push_back({StopCause::HitLevel, rule.level()}); break;
    case StopRule::Kind::ReturnToLevel: levels_.push_back({StopCause::ReturnToLevel, rule.level()}); break;
    case StopRule::Kind::StepBudget:
        has_budget = true;
        budget_ = std::min(budget_, rule.max_steps());
        break;
    case StopRule::Kind::FirstOf:
        for (const auto& r : rule.rules()) flatten(r, has_budget);
        break;
    }
}

PathSummary simulate(const WalkLaw& law, Site start, const StopRule& stop, RngStream& rng,
                     std::span<const SiteObserver> observers, bool retain_steps) {
    return simulate_with(
        law, start, stop, rng,
        [&](Site s) {
            for (const auto& obs : observers) obs(s);
        },
        retain_steps);
}

} // namespace srwlt
