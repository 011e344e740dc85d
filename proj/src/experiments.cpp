#include "srwlt/experiments.hpp"

#include "srwlt/error.hpp"
#include "srwlt/estimators.hpp"
#include "srwlt/exact.hpp"
#include "srwlt/stats.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#ifndef SRWLT_CODE_VERSION
#define SRWLT_CODE_VERSION "dev"
#endif

namespace srwlt {

using nlohmann::json;

const char* code_version() noexcept { return SRWLT_CODE_VERSION; }

std::string to_string(CheckStatus status) {
    switch (status) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skip: return "skip";
    case CheckStatus::Warn: return "warn";
    }
    return "?";
}

CheckStatus check_status_from_string(const std::string& s) {
    if (s == "pass") return CheckStatus::Pass;
    if (s == "fail") return CheckStatus::Fail;
    if (s == "skip") return CheckStatus::Skip;
    return CheckStatus::Warn;
}

int RunResult::failed() const noexcept {
    return static_cast<int>(std::count_if(checks.begin(), checks.end(), [](const Check& c) {
        return c.status == CheckStatus::Fail || c.status == CheckStatus::Warn;
    }));
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

/// Fixed-column CSV with a versioned first line.
class Csv {
public:
    Csv(const std::string& experiment, std::vector<std::string> columns) : width_(columns.size()) {
        out_ << "# srwlt-csv " << experiment << " v1\n";
        row_strings(columns);
    }

    struct Cell {
        std::string text;
        Cell(const std::string& s) : text(s) {}
        Cell(const char* s) : text(s) {}
        Cell(double v) : text(format_double(v)) {}
        Cell(std::int64_t v) : text(std::to_string(v)) {}
        Cell(std::uint64_t v) : text(std::to_string(v)) {}
        Cell(int v) : text(std::to_string(v)) {}
        Cell(bool v) : text(v ? "true" : "false") {}
        Cell(const ExactValue& v) : text(v.str()) {}
    };

    void row(std::initializer_list<Cell> cells) {
        std::vector<std::string> texts;
        for (const auto& c : cells) texts.push_back(c.text);
        row_strings(texts);
    }

    std::string str() const { return out_.str(); }

private:
    void row_strings(const std::vector<std::string>& cells) {
        if (cells.size() != width_) throw std::logic_error("csv row width mismatch");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            const auto& c = cells[i];
            if (c.find_first_of(",\"\n") != std::string::npos) {
                out_ << '"';
                for (char ch : c) {
                    if (ch == '"') out_ << '"';
                    out_ << ch;
                }
                out_ << '"';
            } else {
                out_ << c;
            }
        }
        out_ << '\n';
    }

    std::size_t width_;
    std::ostringstream out_;
};

struct Common {
    std::uint64_t seed = 1;
    unsigned threads = 1;
};

struct Context {
    Params& p;
    Common common;
    json counts = json::object();
    json derived = json::object();
    std::vector<Check> checks;
    std::string csv;

    void check(const std::string& name, int criterion, bool ok, const std::string& detail) {
        checks.push_back({name, criterion, ok ? CheckStatus::Pass : CheckStatus::Fail, detail});
    }
};

constexpr double kSigma4 = 4.0;
constexpr double kSigma3 = 3.0;

std::uint64_t read_budget(Params& p, std::uint64_t fallback) {
    const auto b = p.get_uint("budget", fallback);
    if (b == 0) throw ConfigError("field 'budget': must be positive");
    return b;
}

// ---------------------------------------------------------------------------

void run_exact_enumerate(Context& ctx) {
    auto& p = ctx.p;
    const auto n = p.get_int("n", 12, 1);
    const auto n_min = p.get_int("n_min", n, 1);
    if (n_min > n) throw ConfigError("field 'n_min': must not exceed n");
    if (n > exact::kEnumerateMaxN) {
        throw ResourceCapError("exact-enumerate: n = " + std::to_string(n) + " exceeds the enumeration cap n <= " +
                               std::to_string(exact::kEnumerateMaxN) + " (2^n paths)");
    }
    Csv csv("exact-enumerate", {"n", "k", "expectation_exact", "expectation"});
    bool newman = true;
    std::string first_bad;
    json g1 = json::object();
    for (auto m = n_min; m <= n; ++m) {
        const auto table = exact::enumerate_srw(static_cast<int>(m));
        for (std::size_t k = 1; k < table.expectation.size(); ++k) {
            csv.row({m, static_cast<std::int64_t>(k), table.expectation[k], table.expectation[k].value()});
        }
        g1[std::to_string(m)] = table.expectation[1].str();
        if (!(table.expectation[1] == ExactValue(2, 1))) {
            newman = false;
            if (first_bad.empty()) first_bad = "n=" + std::to_string(m) + " gives " + table.expectation[1].str();
        }
    }
    ctx.derived["expected_g1"] = g1;
    ctx.check("newman_identity", 1, newman,
              newman ? "E g1(n) = 2/1 exactly for n in [" + std::to_string(n_min) + ", " + std::to_string(n) + "]"
                     : first_bad);
    ctx.csv = csv.str();
}

// ---------------------------------------------------------------------------

void run_moments(Context& ctx) {
    auto& p = ctx.p;
    const auto s_list = p.get_int_list("s", {10, 100}, 2);
    const bool bracket = p.get_bool("bracket", false);
    Csv csv("moments", {"s", "k", "restricted", "dp_value", "exact_value", "bruteforce_value", "moment_of_g", "mc_mean",
                        "mc_stderr", "z_score", "deviation"});
    if (bracket) {
        const double bracket_max = p.get_double("bracket_max", 0.5);
        std::vector<double> eps;
        for (auto s : s_list) {
            if (s > exact::kMomentMaxS) {
                throw ResourceCapError("moments: s = " + std::to_string(s) + " exceeds the DP cap s <= " +
                                       std::to_string(exact::kMomentMaxS));
            }
            const auto k = static_cast<std::int64_t>(std::ceil(std::log(static_cast<double>(s))));
            const auto entry = exact::binomial_moment_dp(s, k, false);
            const double e = std::pow(entry.value, 1.0 / static_cast<double>(k)) /
                                 (std::log(static_cast<double>(s)) / 2.0) - 1.0;
            eps.push_back(e);
            csv.row({s, k, false, entry.value, "", "", "", "", "", "", e});
        }
        bool decreasing = true;
        for (std::size_t i = 1; i < eps.size(); ++i) decreasing = decreasing && std::fabs(eps[i]) < std::fabs(eps[i - 1]);
        const bool below = !eps.empty() && std::fabs(eps.back()) < bracket_max;
        std::string detail = "|eps| =";
        for (double e : eps) detail += " " + fmt(std::fabs(e), 6);
        detail += "; final < " + fmt(bracket_max);
        ctx.derived["deviation"] = eps;
        ctx.check("bracket_trend", 5, decreasing && below && eps.size() >= 2, detail);
        ctx.csv = csv.str();
        return;
    }

    const auto k_list = p.get_int_list("k", {1, 2, 3}, 1);
    const bool restricted = p.get_bool("restricted", false);
    const bool with_exact = p.get_bool("exact", false);
    const auto replicas = p.get_uint("replicas", 0);
    const auto budget = read_budget(p, kConditionedDefaultBudget);

    double worst_bf = 0.0;
    std::size_t bf_pairs = 0;
    double worst_z = 0.0;
    std::size_t mc_pairs = 0;
    bool bound_ok = true;
    json mc_counts = json::object();
    for (auto s : s_list) {
        if (s > exact::kMomentMaxS) {
            throw ResourceCapError("moments: s = " + std::to_string(s) + " exceeds the DP cap s <= " +
                                   std::to_string(exact::kMomentMaxS));
        }
        std::optional<GDistribution> dist;
        if (replicas > 0) {
            dist = sample_g_distribution(s, replicas, TailMode::AtLevel, restricted, ctx.common.seed,
                                         ctx.common.threads, budget);
            mc_counts[std::to_string(s)] = {{"histogram", dist->histogram}, {"censored", dist->censored}};
        }
        for (auto k : k_list) {
            if (k > s - 1) continue;
            const auto entry = exact::binomial_moment_dp(s, k, restricted);
            std::string exact_text;
            if (with_exact && s <= exact::kExactMomentMaxS) exact_text = exact::binomial_moment_exact(s, k, restricted).str();
            std::string bf_text;
            if (s <= 14 && k <= 5) {
                const auto bf = exact::composition_sum_bruteforce(s, k, restricted);
                bf_text = bf.str();
                const double diff = std::fabs(bf.value() - entry.value) / std::max(1.0, std::fabs(bf.value()));
                worst_bf = std::max(worst_bf, diff);
                ++bf_pairs;
            }
            std::string mog_text;
            std::string mc_mean;
            std::string mc_se;
            std::string z_text;
            if (!restricted) {
                const double mog = exact::binomial_moment_of_g(s, k);
                mog_text = format_double(mog);
                if (dist) {
                    const auto mc = binomial_moment_mc(*dist, k);
                    const double z = stats::z_score(mc.mean, mog, mc.stderr_);
                    mc_mean = format_double(mc.mean);
                    mc_se = format_double(mc.stderr_);
                    z_text = format_double(z);
                    worst_z = std::max(worst_z, z);
                    ++mc_pairs;
                }
            } else if (dist) {
                // the restricted sum is a lower bound for E binom(g~(s), k)
                const auto mc = binomial_moment_mc(*dist, k);
                mc_mean = format_double(mc.mean);
                mc_se = format_double(mc.stderr_);
                if (mc.mean + kSigma3 * mc.stderr_ < entry.value) bound_ok = false;
                ++mc_pairs;
            }
            csv.row({s, k, restricted, entry.value, exact_text, bf_text, mog_text, mc_mean, mc_se, z_text, ""});
        }
    }
    if (!mc_counts.empty()) ctx.counts["g_histograms"] = mc_counts;
    if (bf_pairs > 0) {
        ctx.check("dp_vs_bruteforce", 4, worst_bf <= 1e-12,
                  std::to_string(bf_pairs) + " pairs, max relative difference " + fmt(worst_bf));
    }
    if (mc_pairs > 0 && !restricted) {
        ctx.check("mc_vs_dp", 4, worst_z <= kSigma3,
                  std::to_string(mc_pairs) + " (s,k) pairs, max |z| = " + fmt(worst_z) + " (limit 3)");
    }
    if (mc_pairs > 0 && restricted) {
        ctx.check("restricted_lower_bound", 0, bound_ok, "MC mean + 3 stderr >= restricted sum on every pair");
    }
    ctx.csv = csv.str();
}

// ---------------------------------------------------------------------------

WalkLaw law_from_config(Params& p, const std::string& key) {
    const auto name = p.get_string(key, "simple_symmetric", {"simple_symmetric", "avoid_zero", "ceiling_stay"});
    if (name == "simple_symmetric") return WalkLaw::simple_symmetric();
    if (name == "avoid_zero") return WalkLaw::avoid_zero();
    return WalkLaw::ceiling_stay(p.get_int("law_ceiling", 1, 1));
}

void run_hitting(Context& ctx) {
    auto& p = ctx.p;
    const auto grid_max = p.get_int("grid_max", 0, 0);
    if (grid_max > 0) {
        if (grid_max < 2) throw ConfigError("field 'grid_max': must be at least 2");
        Csv csv("hitting", {"a", "b", "closed_form_exact", "closed_form", "solve", "abs_diff"});
        double worst = 0.0;
        std::size_t pairs = 0;
        const auto az = WalkLaw::avoid_zero();
        for (std::int64_t a = 1; a < grid_max; ++a) {
            const double up = step_probabilities(az, a).p_up;
            for (std::int64_t b = a + 1; b <= grid_max; ++b) {
                const auto closed = exact::stay_above_probability(a, b);
                // forced to a+1 first, then b must come before a
                const double solve = up * exact::chain_hitting_solve(az, a, b, a + 1, b).value;
                const double diff = std::fabs(closed.value() - solve);
                worst = std::max(worst, diff);
                ++pairs;
                csv.row({a, b, closed, closed.value(), solve, diff});
            }
        }
        ctx.check("stay_above_vs_solve", 3, worst <= 1e-12,
                  std::to_string(pairs) + " pairs 1 <= a < b <= " + std::to_string(grid_max) + ", max |diff| = " +
                      fmt(worst));
        ctx.csv = csv.str();
        return;
    }
    if (p.has("a") || p.has("b")) {
        const auto a = p.get_int("a", 1, 1);
        const auto b = p.get_int("b", 2, 1);
        if (a >= b) throw DomainError("hitting: requires a < b (got a = " + std::to_string(a) + ", b = " + std::to_string(b) + ")");
        Csv csv("hitting", {"a", "b", "closed_form_exact", "closed_form", "solve", "abs_diff"});
        const auto closed = exact::stay_above_probability(a, b);
        const auto az = WalkLaw::avoid_zero();
        const double solve = step_probabilities(az, a).p_up * exact::chain_hitting_solve(az, a, b, a + 1, b).value;
        csv.row({a, b, closed, closed.value(), solve, std::fabs(closed.value() - solve)});
        ctx.check("stay_above_vs_solve", 0, std::fabs(closed.value() - solve) <= 1e-12,
                  "|diff| = " + fmt(std::fabs(closed.value() - solve)));
        ctx.csv = csv.str();
        return;
    }
    const auto law = law_from_config(p, "law");
    const auto floor = p.get_int("floor", 0);
    const auto ceiling = p.get_int("ceiling", 1);
    const auto start = p.get_int("start", floor);
    const auto target = p.get_int("target", ceiling);
    const auto res = exact::chain_hitting_solve(law, floor, ceiling, start, target);
    Csv csv("hitting-chain", {"law", "floor", "ceiling", "start", "target", "probability_exact", "probability"});
    csv.row({law.name(), floor, ceiling, start, target, res.exact ? res.exact->str() : std::string(), res.value});
    ctx.csv = csv.str();
}

// ---------------------------------------------------------------------------

void run_simulate_gk(Context& ctx) {
    auto& p = ctx.p;
    const auto n = p.get_int("n", 1000, 1);
    const auto k_list = p.get_int_list("k", {1, 2}, 1);
    const auto replicas = p.get_uint("replicas", 10000);
    if (replicas == 0) throw ConfigError("field 'replicas': must be positive");
    const bool containment = p.get_bool("containment", false);
    std::optional<std::pair<double, double>> window;
    if (p.has("window_low") || p.has("window_high")) {
        window = std::make_pair(p.get_double("window_low", -INFINITY), p.get_double("window_high", INFINITY));
    }

    Csv csv("simulate-gk", {"quantity", "n", "k", "replicas", "value", "stderr", "exact_value", "exact", "z_score"});
    std::optional<exact::EnumerationTable> table;
    if (n <= 20) table = exact::enumerate_srw(static_cast<int>(n));
    double worst_z = 0.0;
    bool in_window = true;
    std::string window_detail;
    json sums = json::object();
    for (auto k : k_list) {
        const auto est = estimate_mean_gk(n, k, replicas, ctx.common.seed, ctx.common.threads);
        // sums are integer-valued, so they serialize exactly
        sums[std::to_string(k)] = {{"n", est.moments.n},
                                   {"sum", static_cast<std::uint64_t>(est.moments.sum)},
                                   {"sum_sq", static_cast<std::uint64_t>(est.moments.sum_sq)}};
        std::string exact_text;
        std::string exact_value;
        std::string z_text;
        if (table) {
            const ExactValue ex = static_cast<std::size_t>(k) < table->expectation.size()
                                      ? table->expectation[static_cast<std::size_t>(k)]
                                      : ExactValue(0, 1);
            exact_text = ex.str();
            exact_value = format_double(ex.value());
            const double z = stats::z_score(est.mean(), ex.value(), est.stderr_());
            z_text = format_double(z);
            worst_z = std::max(worst_z, z);
        }
        if (window) {
            const bool ok = est.mean() >= window->first && est.mean() <= window->second;
            in_window = in_window && ok;
            window_detail += (window_detail.empty() ? "" : "; ") + std::string("k=") + std::to_string(k) + " mean " +
                             fmt(est.mean(), 6);
        }
        csv.row({"mean_gk", n, k, replicas, est.mean(), est.stderr_(), exact_text, exact_value, z_text});
    }
    ctx.counts["gk_sums"] = sums;
    if (table) {
        ctx.check("mean_vs_exact", 0, worst_z <= kSigma4, "max |z| = " + fmt(worst_z) + " against enumeration (limit 4)");
    }
    if (window) {
        ctx.check("mean_window", 0, in_window,
                  window_detail + " in [" + fmt(window->first) + ", " + fmt(window->second) + "]");
    }
    if (containment) {
        const auto rep = containment_run(n, replicas, ctx.common.seed, ctx.common.threads);
        ctx.counts["containment"] = {{"paths", rep.paths}, {"violations", rep.violations}};
        csv.row({"containment_violations", n, std::int64_t{0}, rep.paths, static_cast<std::int64_t>(rep.violations), "",
                 "0/1", "0", ""});
        ctx.check("containment", 6, rep.violations == 0,
                  std::to_string(rep.violations) + " violations over " + std::to_string(rep.paths) +
                      " paths of length " + std::to_string(n));
    }
    ctx.csv = csv.str();
}

// ---------------------------------------------------------------------------

void run_tail_g(Context& ctx) {
    auto& p = ctx.p;
    const auto s_list = p.get_int_list("s", {100}, 2);
    const auto mode_name = p.get_string("mode", "at_level", {"at_level", "max_over_levels"});
    const TailMode mode = mode_name == "at_level" ? TailMode::AtLevel : TailMode::MaxOverLevels;
    const bool restricted = p.get_bool("restricted", false);
    const auto replicas = p.get_uint("replicas", 10000);
    if (replicas == 0) throw ConfigError("field 'replicas': must be positive");
    const auto budget = read_budget(p, kConditionedDefaultBudget);
    const auto m_list = p.get_int_list("M", p.has("C") ? std::vector<std::int64_t>{} : std::vector<std::int64_t>{1}, 0);
    std::optional<double> coef;
    if (p.has("C")) coef = p.get_double("C", 0.15);
    const double slope_low = coef ? p.get_double("slope_low", -0.45) : 0.0;
    const double slope_high = coef ? p.get_double("slope_high", -0.15) : 0.0;
    if (coef && *coef <= 0.0) throw ConfigError("field 'C': must be positive");

    Csv csv("tail-g", {"s", "M", "mode", "restricted", "replicas", "censored", "hits", "p_hat", "stderr"});
    json hist = json::object();
    std::vector<ExponentPoint> fit_points;
    bool monotone = true;
    for (auto s : s_list) {
        const auto dist = sample_g_distribution(s, replicas, mode, restricted, ctx.common.seed, ctx.common.threads, budget);
        hist[std::to_string(s)] = {{"histogram", dist.histogram}, {"censored", dist.censored}};
        std::vector<std::int64_t> thresholds = m_list;
        std::sort(thresholds.begin(), thresholds.end());
        double prev = 2.0;
        for (auto m : thresholds) {
            const auto est = tail_from_distribution(dist, m);
            if (est.probability_hat > prev) monotone = false;
            prev = est.probability_hat;
            csv.row({s, m, mode_name, restricted, est.replicas, est.censored, est.hits, est.probability_hat, est.stderr_});
        }
        if (coef) {
            const double l = std::log(static_cast<double>(s));
            const auto m = static_cast<std::int64_t>(std::ceil(*coef * l * l));
            const auto est = tail_from_distribution(dist, m);
            csv.row({s, m, mode_name, restricted, est.replicas, est.censored, est.hits, est.probability_hat, est.stderr_});
            fit_points.push_back({l, est.probability_hat, est.stderr_});
        }
    }
    ctx.counts["g_histograms"] = hist;
    if (m_list.size() > 1) ctx.check("monotone_in_M", 0, monotone, "p_hat nonincreasing in M on common samples");
    if (coef && fit_points.size() >= 2) {
        const bool positive = std::all_of(fit_points.begin(), fit_points.end(),
                                          [](const ExponentPoint& e) { return e.p_hat > 0.0; });
        if (!positive) {
            ctx.check("slope_window", 7, false, "some p_hat = 0, slope undefined");
        } else {
            const auto fit = fit_exponent(fit_points);
            ctx.derived["slope_fit"] = {{"slope", fit.slope},       {"intercept", fit.intercept},
                                        {"slope_stderr", fit.slope_stderr}, {"ci_low", fit.ci_low},
                                        {"ci_high", fit.ci_high},   {"weighted", fit.weighted}};
            ctx.check("slope_window", 7, fit.slope >= slope_low && fit.slope <= slope_high,
                      "slope " + fmt(fit.slope) + " +- " + fmt(fit.slope_stderr, 2) + " in [" + fmt(slope_low) + ", " +
                          fmt(slope_high) + "]");
        }
    }
    ctx.csv = csv.str();
}

// ---------------------------------------------------------------------------

json strata_json(const TailEstimate& est) {
    json arr = json::array();
    for (const auto& st : est.strata) arr.push_back({st.height, st.replicas, st.hits});
    return arr;
}

void run_tail_excursion(Context& ctx) {
    auto& p = ctx.p;
    const auto m_list = p.get_int_list("M", {9, 16, 25}, 1);
    const auto cap = p.get_int("K", 1024, 1);
    const auto proposal_name = p.get_string("proposal", "log_uniform", {"log_uniform", "uniform", "custom"});
    Proposal proposal;
    if (proposal_name == "uniform") proposal.kind = Proposal::Kind::Uniform;
    if (proposal_name == "custom") {
        proposal.kind = Proposal::Kind::Custom;
        proposal.masses = p.get_double_list("masses", {});
        if (m_list.size() != 1) throw ConfigError("field 'masses': a custom proposal needs exactly one M");
    }
    const auto replicas = p.get_uint("replicas", 100000);
    const double exp_low = p.get_double("exponent_low", 0.6);
    const double exp_high = p.get_double("exponent_high", 1.4);
    const auto direct_replicas = p.get_uint("direct.replicas", 0);
    const auto direct_m = direct_replicas ? p.get_int("direct.M", 2, 1) : 0;
    const auto direct_ceiling = direct_replicas ? p.get_int("direct.ceiling", 64, 1) : 0;
    const auto levels = p.get_int_list("height.levels", {}, 1);
    const auto height_replicas = levels.empty() ? 0 : p.get_uint("height.replicas", 1000000);

    Csv csv("tail-excursion",
            {"method", "M", "cap", "replicas", "hits", "p_hat", "stderr", "truncation_bound", "exponent", "oracle"});
    json strata = json::object();
    std::vector<double> exponents;
    bool any_zero = false;
    for (auto m : m_list) {
        if (m > cap) throw ConfigError("field 'K': must be at least every M (got K = " + std::to_string(cap) + ")");
        const auto est = estimate_excursion_tail(m, cap, proposal, replicas, ctx.common.seed, ctx.common.threads);
        const double e = est.probability_hat > 0.0 ? -std::log(est.probability_hat) / (2.0 * std::sqrt(double(m)))
                                                   : INFINITY;
        any_zero = any_zero || est.probability_hat <= 0.0;
        exponents.push_back(e);
        strata[std::to_string(m)] = strata_json(est);
        csv.row({"stratified", m, cap, est.replicas, est.hits, est.probability_hat, est.stderr_, est.truncation_bound, e,
                 ""});
    }
    ctx.counts["strata"] = strata;
    ctx.derived["exponents"] = exponents;
    if (m_list.size() >= 2) {
        bool increasing = !any_zero;
        for (std::size_t i = 1; i < exponents.size(); ++i) increasing = increasing && exponents[i] > exponents[i - 1];
        const double last = exponents.back();
        std::string detail = "-log p/(2 sqrt M) =";
        for (double e : exponents) detail += " " + fmt(e);
        detail += "; final in [" + fmt(exp_low) + ", " + fmt(exp_high) + "]";
        ctx.check("exponent_trend", 8, increasing && last >= exp_low && last <= exp_high, detail);
    }

    if (direct_replicas > 0) {
        const auto strat = estimate_excursion_tail(direct_m, direct_ceiling, proposal.kind == Proposal::Kind::Custom
                                                                                  ? Proposal{}
                                                                                  : proposal,
                                                   replicas, ctx.common.seed, ctx.common.threads);
        const auto direct = estimate_excursion_tail_direct(direct_m, direct_ceiling, direct_replicas, ctx.common.seed,
                                                           ctx.common.threads);
        csv.row({"stratified", direct_m, direct_ceiling, strat.replicas, strat.hits, strat.probability_hat, strat.stderr_,
                 strat.truncation_bound, "", ""});
        csv.row({"direct", direct_m, direct_ceiling, direct.replicas, direct.hits, direct.probability_hat, direct.stderr_,
                 direct.truncation_bound, "", ""});
        ctx.counts["comparison"] = {{"stratified", strata_json(strat)},
                                    {"direct", {{"replicas", direct.replicas}, {"hits", direct.hits}}}};
        const double joint = std::sqrt(strat.stderr_ * strat.stderr_ + direct.stderr_ * direct.stderr_);
        const double z = stats::z_score(strat.probability_hat, direct.probability_hat, joint);
        ctx.check("stratified_vs_direct", 8, z <= kSigma3,
                  "M=" + std::to_string(direct_m) + " ceiling=" + std::to_string(direct_ceiling) + ": " +
                      fmt(strat.probability_hat, 6) + " vs " + fmt(direct.probability_hat, 6) + ", |z| = " + fmt(z) +
                      " (limit 3)");
    }

    if (!levels.empty()) {
        const auto points = height_law_mc(levels, height_replicas, ctx.common.seed, ctx.common.threads);
        double worst = 0.0;
        json hl = json::array();
        for (const auto& pt : points) {
            const auto oracle = exact::height_ccdf(pt.k);
            const double q = oracle.value();
            const double se = std::sqrt(q * (1.0 - q) / static_cast<double>(pt.freq.trials));
            const double z = stats::z_score(pt.freq.p(), q, se);
            worst = std::max(worst, z);
            hl.push_back({pt.k, pt.freq.trials, pt.freq.successes});
            csv.row({"height_law", pt.k, pt.k, pt.freq.trials, pt.freq.successes, pt.freq.p(), pt.freq.stderr_(), "", "",
                     oracle});
        }
        ctx.counts["height_law"] = hl;
        ctx.check("height_law", 2, worst <= kSigma4,
                  std::to_string(points.size()) + " levels, max |z| = " + fmt(worst) + " against 1/k (limit 4)");
    }
    ctx.csv = csv.str();
}

// ---------------------------------------------------------------------------

void run_ladder(Context& ctx) {
    auto& p = ctx.p;
    const auto k = p.get_int("K", 16, 2);
    const auto replicas = p.get_uint("replicas", 1000000);
    if (replicas == 0) throw ConfigError("field 'replicas': must be positive");
    LadderOptions opts;
    opts.budget = read_budget(p, kConditionedDefaultBudget);
    opts.y_tail_cap = p.get_int("y_tail_cap", 0, 0);
    opts.max_segments = static_cast<std::uint32_t>(p.get_int("max_segments", 8, 1));
    const auto sum = ladder_run(k, replicas, ctx.common.seed, ctx.common.threads, opts);

    Csv csv("ladder", {"quantity", "index", "count", "trials", "estimate", "stderr", "oracle"});
    const auto reach_oracle = exact::height_ccdf(k);
    const stats::Proportion reach{sum.reached, replicas - sum.censored};
    const double reach_se = std::sqrt(reach_oracle.value() * (1.0 - reach_oracle.value()) / double(reach.trials));
    csv.row({"reach_k", k, sum.reached, reach.trials, reach.p(), reach.stderr_(), reach_oracle});

    const auto a1_oracle =
        exact::chain_hitting_solve(WalkLaw::simple_symmetric(), k / 2, 2 * k, k, 2 * k);
    const stats::Proportion a1{sum.a1_success, sum.a1_decided};
    const double a1_q = a1_oracle.value;
    const double a1_se = a1.trials ? std::sqrt(a1_q * (1.0 - a1_q) / double(a1.trials)) : 0.0;
    csv.row({"a1_given_reach", k, sum.a1_success, sum.a1_decided, a1.p(), a1.stderr_(),
             a1_oracle.exact ? a1_oracle.exact->str() : format_double(a1_q)});

    std::uint64_t y_total = sum.y_tail;
    for (auto c : sum.y_counts) y_total += c;
    std::vector<std::uint64_t> y_obs;
    std::vector<double> y_prob;
    for (std::int64_t v = 1; v < sum.y_tail_cap; ++v) {
        const auto c = sum.y_counts[static_cast<std::size_t>(v)];
        const auto pmf = exact::height_pmf(v);
        y_obs.push_back(c);
        y_prob.push_back(pmf.value());
        csv.row({"y", v, c, y_total, y_total ? double(c) / double(y_total) : 0.0, "", pmf});
    }
    const auto tail_oracle = exact::height_ccdf(sum.y_tail_cap);
    csv.row({"y_tail", sum.y_tail_cap, sum.y_tail, y_total, y_total ? double(sum.y_tail) / double(y_total) : 0.0, "",
             tail_oracle});
    std::uint64_t z_total = 0;
    for (auto c : sum.z_counts) z_total += c;
    for (std::size_t v = 1; v < sum.z_counts.size(); ++v) {
        csv.row({"z", static_cast<std::int64_t>(v), sum.z_counts[v], z_total,
                 z_total ? double(sum.z_counts[v]) / double(z_total) : 0.0, "", ""});
    }
    ctx.counts["ladder"] = {{"replicas", replicas},           {"reached", sum.reached},
                            {"a1_decided", sum.a1_decided},   {"a1_success", sum.a1_success},
                            {"censored", sum.censored},       {"y_counts", sum.y_counts},
                            {"y_tail", sum.y_tail},           {"y_tail_cap", sum.y_tail_cap},
                            {"z_counts", sum.z_counts}};

    const double z_reach = stats::z_score(reach.p(), reach_oracle.value(), reach_se);
    ctx.check("reach_k", 9, z_reach <= kSigma4,
              "P(reach K) " + fmt(reach.p(), 6) + " vs " + reach_oracle.str() + ", |z| = " + fmt(z_reach));
    const double z_a1 = stats::z_score(a1.p(), a1_q, a1_se);
    ctx.check("a1_gamblers_ruin", 9, a1.trials > 0 && z_a1 <= kSigma4,
              "P(A1 | reach K) " + fmt(a1.p(), 6) + " vs " + fmt(a1_q, 6) + ", |z| = " + fmt(z_a1));
    const auto chi = stats::chi_square_gof(y_obs, y_prob, sum.y_tail, tail_oracle.value());
    ctx.derived["y_chi_square"] = {{"statistic", chi.statistic}, {"dof", chi.dof}, {"p_value", chi.p_value}};
    ctx.check("y_pmf", 9, y_total > 0 && chi.p_value > 1e-3,
              std::to_string(y_total) + " Y samples, chi2 = " + fmt(chi.statistic) + " on " + std::to_string(chi.dof) +
                  " dof, p = " + fmt(chi.p_value));
    if (sum.censored) {
        ctx.checks.push_back({"censored", 9, CheckStatus::Skip,
                              std::to_string(sum.censored) + " replicas hit the budget and were excluded"});
    }
    ctx.csv = csv.str();
}

// ---------------------------------------------------------------------------

void run_sigma_growth(Context& ctx) {
    auto& p = ctx.p;
    const auto j_max = p.get_int("j_max", 1000, 10);
    auto checkpoints = p.get_int_list("checkpoints", {2, 3, 5}, 2);
    const auto replicas = p.get_uint("replicas", 1000);
    if (!p.has("budget")) {
        throw ConfigError("sigma-growth: the simple symmetric walk needs an explicit step budget (set 'budget')");
    }
    const auto budget = read_budget(p, 0);
    const double span_low = p.get_double("span_low", 0.8);
    const double span_high = p.get_double("span_high", 1.2);
    const double sigma_low = p.get_double("sigma_low", 1.6);
    const double sigma_high = p.get_double("sigma_high", 2.4);
    const auto law_cap = p.get_int("law_cap", 400, 2);
    checkpoints.push_back(j_max);
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

    const auto points = sigma_growth(j_max, checkpoints, replicas, budget, ctx.common.seed, ctx.common.threads);
    Csv csv("sigma-growth", {"j", "replicas", "censored", "median_log_sigma", "q25_log_sigma", "q75_log_sigma",
                             "median_log_span", "q25_log_span", "q75_log_span"});
    json raw = json::object();
    for (const auto& gp : points) {
        csv.row({gp.j, replicas, gp.censored, gp.median_sigma, gp.q25_sigma, gp.q75_sigma, gp.median_span, gp.q25_span,
                 gp.q75_span});
        raw[std::to_string(gp.j)] = {{"sigma", gp.sigma}, {"span", gp.span}};
    }
    ctx.counts["per_replica"] = raw;

    const auto& last = points.back();
    ctx.check("growth_span", 11, last.median_span >= span_low && last.median_span <= span_high,
              "median log R/log j at j=" + std::to_string(last.j) + " = " + fmt(last.median_span) + " (IQR " +
                  fmt(last.q25_span) + ".." + fmt(last.q75_span) + ") in [" + fmt(span_low) + ", " + fmt(span_high) +
                  "]");
    ctx.check("growth_sigma", 11, last.median_sigma >= sigma_low && last.median_sigma <= sigma_high,
              "median log sigma/log j at j=" + std::to_string(last.j) + " = " + fmt(last.median_sigma) + " (IQR " +
                  fmt(last.q25_sigma) + ".." + fmt(last.q75_sigma) + ") in [" + fmt(sigma_low) + ", " +
                  fmt(sigma_high) + "]");
    if (last.censored) {
        ctx.checks.push_back({"censored", 11, CheckStatus::Skip,
                              std::to_string(last.censored) + " replicas hit the budget before sigma_" +
                                  std::to_string(last.j) + " (counted as +inf in the medians)"});
    }

    for (const auto& gp : points) {
        if (gp.j != 2 && gp.j != 3 && gp.j != 5) continue;
        const auto conv = exact::convolve_height_pmf(gp.j, law_cap);
        std::vector<std::uint64_t> obs(static_cast<std::size_t>(law_cap) + 1, 0);
        std::uint64_t tail = 0;
        for (auto r : gp.span) {
            if (r < 0) continue;
            if (r > law_cap) {
                ++tail;
            } else {
                ++obs[static_cast<std::size_t>(r)];
            }
        }
        std::vector<double> probs;
        for (const auto& v : conv.pmf) probs.push_back(v.value());
        const auto chi = stats::chi_square_gof(std::vector<std::uint64_t>(obs.begin() + gp.j, obs.end()),
                                               std::vector<double>(probs.begin() + gp.j, probs.end()), tail,
                                               conv.tail_mass.value());
        ctx.check("span_law_j" + std::to_string(gp.j), 0, chi.p_value > 1e-3,
                  "R_sigma_" + std::to_string(gp.j) + " vs convolution: chi2 = " + fmt(chi.statistic) + " on " +
                      std::to_string(chi.dof) + " dof, p = " + fmt(chi.p_value));
    }
    ctx.csv = csv.str();
}

// ---------------------------------------------------------------------------

void run_scaling_check(Context& ctx) {
    auto& p = ctx.p;
    const auto n1 = p.get_int("N1", 50, 1);
    const auto n2 = p.get_int("N2", 500, 1);
    const auto m = p.get_int("M", 26, 1);
    const auto replicas = p.get_uint("replicas", 10000);
    const auto budget = read_budget(p, kConditionedDefaultBudget);
    const auto rep = check_scaling_inequality(n1, n2, m, replicas, ctx.common.seed, ctx.common.threads, budget);
    Csv csv("scaling-check", {"N1", "N2", "M", "replicas", "censored", "hits_n1", "hits_n2", "factor", "lhs_hat",
                              "lhs_stderr", "rhs_p_hat", "rhs_bound", "margin", "margin_stderr", "status"});
    csv.row({n1, n2, m, rep.replicas, rep.censored, rep.hits_n1, rep.hits_n2, rep.factor, rep.lhs_hat, rep.lhs_stderr,
             rep.rhs_p_hat, rep.rhs_bound, rep.margin, rep.margin_stderr, to_string(rep.status)});
    ctx.counts["scaling"] = {{"replicas", rep.replicas}, {"censored", rep.censored}, {"hits_n1", rep.hits_n1},
                             {"hits_n2", rep.hits_n2}};
    const std::string detail = "lhs " + fmt(rep.lhs_hat) + " vs bound " + fmt(rep.rhs_bound) + " (factor " +
                               fmt(rep.factor) + "), margin " + fmt(rep.margin) + " = " +
                               fmt(rep.margin_stderr > 0 ? rep.margin / rep.margin_stderr : 0.0) + " stderr";
    switch (rep.status) {
    case ScalingReport::Status::Satisfied: ctx.check("scaling_inequality", 10, true, detail); break;
    case ScalingReport::Status::Violated: ctx.check("scaling_inequality", 10, false, "violated: " + detail); break;
    case ScalingReport::Status::Inconclusive:
        ctx.check("scaling_inequality", 10, false, "inconclusive: " + detail);
        break;
    case ScalingReport::Status::NotApplicable:
        ctx.checks.push_back({"scaling_inequality", 10, CheckStatus::Skip, "not applicable (lhs > 0.1): " + detail});
        break;
    }
    ctx.csv = csv.str();
}

using Runner = void (*)(Context&);

const std::map<std::string, Runner>& runners() {
    static const std::map<std::string, Runner> table = {
        {"exact-enumerate", run_exact_enumerate}, {"moments", run_moments},
        {"hitting", run_hitting},                 {"simulate-gk", run_simulate_gk},
        {"tail-g", run_tail_g},                   {"tail-excursion", run_tail_excursion},
        {"ladder", run_ladder},                   {"sigma-growth", run_sigma_growth},
        {"scaling-check", run_scaling_check},
    };
    return table;
}

json checks_json(const std::vector<Check>& checks) {
    json arr = json::array();
    for (const auto& c : checks) {
        arr.push_back({{"name", c.name}, {"criterion", c.criterion}, {"status", to_string(c.status)}, {"detail", c.detail}});
    }
    return arr;
}

} // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {"exact-enumerate", "moments",        "hitting",
                                                   "simulate-gk",     "tail-g",         "tail-excursion",
                                                   "ladder",          "sigma-growth",   "scaling-check"};
    return names;
}

RunResult run_experiment(const std::string& name, const ConfigTree& config) {
    const auto it = runners().find(name);
    if (it == runners().end()) throw ConfigError("unknown experiment '" + name + "'");
    Params params(config);
    if (params.has("experiment")) {
        const auto declared = params.get_string("experiment", name);
        if (declared != name) {
            throw ConfigError("config declares experiment '" + declared + "' but '" + name + "' was requested");
        }
    }
    Context ctx{params, {}, json::object(), json::object(), {}, {}};
    ctx.common.seed = params.get_uint("seed", 1);
    {
        // threads is scheduling only; it must not reach the effective config
        Params scratch(config);
        const auto t = scratch.get_uint("threads", 1);
        if (t == 0 || t > 1024) throw ConfigError("field 'threads': must lie in [1, 1024]");
        ctx.common.threads = static_cast<unsigned>(t);
        params.ignore("threads");
    }

    const auto t0 = std::chrono::steady_clock::now();
    it->second(ctx);
    params.finish();
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    RunResult out;
    out.experiment = name;
    out.csv = std::move(ctx.csv);
    out.checks = std::move(ctx.checks);
    out.manifest = {
        {"schema", kManifestSchema},
        {"code_version", code_version()},
        {"experiment", name},
        {"config", params.effective()},
        {"counts", ctx.counts},
        {"derived", ctx.derived},
        {"checks", checks_json(out.checks)},
        {"volatile", {{"wall_clock_seconds", wall}, {"threads", ctx.common.threads}}},
    };
    return out;
}

json stable_manifest(const json& manifest) {
    json copy = manifest;
    if (copy.is_object()) copy.erase("volatile");
    return copy;
}

RunResult report(const std::vector<json>& manifests, const std::vector<std::string>& labels) {
    struct Row {
        std::vector<std::string> names;
        std::vector<std::string> details;
        std::vector<std::string> sources;
        bool any_fail = false;
        bool any_pass = false;
    };
    std::map<int, Row> criteria;
    Csv csv("report", {"criterion", "status", "checks", "detail", "source"});
    RunResult out;
    out.experiment = "report";
    std::vector<std::array<std::string, 5>> aux;
    for (std::size_t i = 0; i < manifests.size(); ++i) {
        const auto& m = manifests[i];
        const std::string label = i < labels.size() ? labels[i] : "manifest " + std::to_string(i);
        const std::string schema = m.value("schema", "");
        const std::string version = m.value("code_version", "");
        if (schema != kManifestSchema || version != code_version()) {
            const std::string detail = "written by schema '" + schema + "' version '" + version + "', this is '" +
                                       kManifestSchema + "' version '" + code_version() + "'";
            aux.push_back({"-", "warn", "version", detail, label});
            out.checks.push_back({"version", 0, CheckStatus::Warn, label + ": " + detail});
        }
        if (!m.contains("checks") || !m["checks"].is_array()) continue;
        for (const auto& c : m["checks"]) {
            const int crit = c.value("criterion", 0);
            const auto status = check_status_from_string(c.value("status", "warn"));
            const std::string name = m.value("experiment", "?") + "." + c.value("name", "?");
            const std::string detail = c.value("detail", "");
            if (crit <= 0) {
                aux.push_back({"-", to_string(status), name, detail, label});
                out.checks.push_back({name, 0, status, detail});
                continue;
            }
            auto& row = criteria[crit];
            row.names.push_back(name);
            row.details.push_back(detail);
            if (std::find(row.sources.begin(), row.sources.end(), label) == row.sources.end()) row.sources.push_back(label);
            if (status == CheckStatus::Fail || status == CheckStatus::Warn) row.any_fail = true;
            if (status == CheckStatus::Pass) row.any_pass = true;
        }
    }
    auto join = [](const std::vector<std::string>& v, const char* sep) {
        std::string s;
        for (const auto& x : v) s += (s.empty() ? "" : sep) + x;
        return s;
    };
    for (const auto& [crit, row] : criteria) {
        const CheckStatus status = row.any_fail ? CheckStatus::Fail : row.any_pass ? CheckStatus::Pass : CheckStatus::Skip;
        csv.row({crit, to_string(status), join(row.names, " "), join(row.details, " | "), join(row.sources, " ")});
        out.checks.push_back({"criterion_" + std::to_string(crit), crit, status, join(row.details, " | ")});
    }
    for (const auto& r : aux) csv.row({r[0], r[1], r[2], r[3], r[4]});
    out.csv = csv.str();
    out.manifest = {{"schema", kManifestSchema},
                    {"code_version", code_version()},
                    {"experiment", "report"},
                    {"config", {{"manifests", labels}}},
                    {"counts", json::object()},
                    {"derived", json::object()},
                    {"checks", checks_json(out.checks)},
                    {"volatile", json::object()}};
    return out;
}

} // namespace srwlt
