#include "srwlt/srwlt.h"

#include "srwlt/config.hpp"
#include "srwlt/error.hpp"
#include "srwlt/exact.hpp"
#include "srwlt/experiments.hpp"
#include "srwlt/localtime.hpp"
#include "srwlt/walk.hpp"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <string>
#include <utility>
#include <vector>

struct srwlt_result {
    std::string csv;
    std::string manifest;
    std::string checks_text;
    int failed = 0;
};

struct srwlt_walk {
    srwlt::Stepper stepper;
    srwlt::RngStream rng;
    srwlt::Site position;
};

struct srwlt_tally {
    srwlt::VisitTally tally;
};

namespace {

thread_local std::string last_error;

srwlt_status fail(srwlt_status status, const std::string& message) {
    last_error = message;
    return status;
}

// Maps the library's exception types onto status codes.
template <class F>
srwlt_status guarded(F&& body) {
    try {
        last_error.clear();
        return body();
    } catch (const srwlt::ConfigError& e) {
        return fail(SRWLT_ERR_CONFIG, e.what());
    } catch (const srwlt::ResourceCapError& e) {
        return fail(SRWLT_ERR_RESOURCE, e.what());
    } catch (const srwlt::DomainError& e) {
        return fail(SRWLT_ERR_DOMAIN, e.what());
    } catch (const srwlt::ContractViolation& e) {
        return fail(SRWLT_ERR_CONTRACT, e.what());
    } catch (const std::bad_alloc&) {
        return fail(SRWLT_ERR_RESOURCE, "out of memory");
    } catch (const std::exception& e) {
        return fail(SRWLT_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(SRWLT_ERR_INTERNAL, "unknown error");
    }
}

char* dup_string(const std::string& s) {
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

srwlt::WalkLaw make_law(srwlt_law_kind kind, int64_t ceiling) {
    switch (kind) {
    case SRWLT_LAW_SIMPLE_SYMMETRIC: return srwlt::WalkLaw::simple_symmetric();
    case SRWLT_LAW_AVOID_ZERO: return srwlt::WalkLaw::avoid_zero();
    case SRWLT_LAW_CEILING_STAY: return srwlt::WalkLaw::ceiling_stay(ceiling);
    }
    throw srwlt::DomainError("unknown law kind " + std::to_string(static_cast<int>(kind)));
}

srwlt_status put_exact(const srwlt::ExactValue& v, double* value, char** exact_out) {
    if (!value) return fail(SRWLT_ERR_NULL, "value pointer is NULL");
    *value = v.value();
    if (exact_out) *exact_out = dup_string(v.str());
    return SRWLT_OK;
}

srwlt_result* make_result(const srwlt::RunResult& r) {
    auto* out = new srwlt_result;
    out->csv = r.csv;
    out->manifest = r.manifest.dump(2) + "\n";
    out->failed = r.failed();
    for (const auto& c : r.checks) {
        out->checks_text += srwlt::to_string(c.status) + "\t" + std::to_string(c.criterion) + "\t" + c.name + "\t" +
                            c.detail + "\n";
    }
    return out;
}

} // namespace

extern "C" {

const char* srwlt_version(void) { return srwlt::code_version(); }

const char* srwlt_last_error(void) { return last_error.c_str(); }

const char* srwlt_status_name(srwlt_status status) {
    switch (status) {
    case SRWLT_OK: return "ok";
    case SRWLT_ERR_DOMAIN: return "domain error";
    case SRWLT_ERR_CONTRACT: return "contract violation";
    case SRWLT_ERR_CONFIG: return "configuration error";
    case SRWLT_ERR_RESOURCE: return "resource cap exceeded";
    case SRWLT_ERR_INTERNAL: return "internal error";
    case SRWLT_ERR_NULL: return "null argument";
    }
    return "unknown status";
}

void srwlt_string_free(char* s) { std::free(s); }

srwlt_status srwlt_step_probabilities(srwlt_law_kind law, int64_t ceiling, int64_t x, double* p_down, double* p_up) {
    return guarded([&] {
        if (!p_down || !p_up) return fail(SRWLT_ERR_NULL, "output pointer is NULL");
        const auto p = srwlt::step_probabilities(make_law(law, ceiling), x);
        *p_down = p.p_down;
        *p_up = p.p_up;
        return SRWLT_OK;
    });
}

srwlt_status srwlt_height_pmf(int64_t k, double* value, char** exact_out) {
    return guarded([&] { return put_exact(srwlt::exact::height_pmf(k), value, exact_out); });
}

srwlt_status srwlt_height_ccdf(int64_t k, double* value, char** exact_out) {
    return guarded([&] { return put_exact(srwlt::exact::height_ccdf(k), value, exact_out); });
}

srwlt_status srwlt_stay_above(int64_t a, int64_t b, double* value, char** exact_out) {
    return guarded([&] { return put_exact(srwlt::exact::stay_above_probability(a, b), value, exact_out); });
}

srwlt_status srwlt_chain_hitting(srwlt_law_kind law, int64_t ceiling, int64_t floor_site, int64_t ceiling_site,
                                 int64_t start, int64_t target, double* value, char** exact_out) {
    return guarded([&] {
        if (!value) return fail(SRWLT_ERR_NULL, "value pointer is NULL");
        const auto r = srwlt::exact::chain_hitting_solve(make_law(law, ceiling), floor_site, ceiling_site, start, target);
        *value = r.value;
        if (exact_out) *exact_out = r.exact ? dup_string(r.exact->str()) : nullptr;
        return SRWLT_OK;
    });
}

srwlt_status srwlt_binomial_moment_dp(int64_t s, int64_t k, int restricted, double* value) {
    return guarded([&] {
        if (!value) return fail(SRWLT_ERR_NULL, "value pointer is NULL");
        *value = srwlt::exact::binomial_moment_dp(s, k, restricted != 0).value;
        return SRWLT_OK;
    });
}

srwlt_status srwlt_enumerate_expectation(int n, int k, double* value, char** exact_out) {
    return guarded([&] {
        const auto table = srwlt::exact::enumerate_srw(n);
        if (k < 1) return fail(SRWLT_ERR_DOMAIN, "k must be at least 1");
        const auto idx = static_cast<std::size_t>(k);
        const srwlt::ExactValue v = idx < table.expectation.size() ? table.expectation[idx] : srwlt::ExactValue(0, 1);
        return put_exact(v, value, exact_out);
    });
}

srwlt_status srwlt_walk_create(srwlt_law_kind law, int64_t ceiling, int64_t start, uint64_t seed, uint64_t stream,
                               srwlt_walk** out) {
    return guarded([&] {
        if (!out) return fail(SRWLT_ERR_NULL, "out pointer is NULL");
        auto l = make_law(law, ceiling);
        if (!l.in_domain(start)) {
            return fail(SRWLT_ERR_DOMAIN, "start " + std::to_string(start) + " is outside the domain of " + l.name());
        }
        *out = new srwlt_walk{srwlt::Stepper(std::move(l)), srwlt::RngStream(seed, stream), start};
        return SRWLT_OK;
    });
}

srwlt_status srwlt_walk_step(srwlt_walk* walk, int64_t* position) {
    return guarded([&] {
        if (!walk || !position) return fail(SRWLT_ERR_NULL, "walk or position pointer is NULL");
        if (!walk->stepper.law().in_domain(walk->position)) {
            return fail(SRWLT_ERR_DOMAIN, "walk at " + std::to_string(walk->position) + " has left the domain of " +
                                              walk->stepper.law().name());
        }
        walk->position += walk->stepper.step(walk->position, walk->rng);
        *position = walk->position;
        return SRWLT_OK;
    });
}

void srwlt_walk_free(srwlt_walk* walk) { delete walk; }

srwlt_status srwlt_tally_create(uint32_t k_max, srwlt_tally** out) {
    return guarded([&] {
        if (!out) return fail(SRWLT_ERR_NULL, "out pointer is NULL");
        if (k_max < 1) return fail(SRWLT_ERR_DOMAIN, "k_max must be at least 1");
        *out = new srwlt_tally{srwlt::VisitTally(k_max)};
        return SRWLT_OK;
    });
}

srwlt_status srwlt_tally_record(srwlt_tally* tally, int64_t site) {
    return guarded([&] {
        if (!tally) return fail(SRWLT_ERR_NULL, "tally pointer is NULL");
        tally->tally.record_step(site);
        return SRWLT_OK;
    });
}

srwlt_status srwlt_tally_once_count(const srwlt_tally* tally, int64_t* out) {
    return guarded([&] {
        if (!tally || !out) return fail(SRWLT_ERR_NULL, "tally or out pointer is NULL");
        *out = tally->tally.once_count();
        return SRWLT_OK;
    });
}

srwlt_status srwlt_tally_g(const srwlt_tally* tally, uint64_t k, int64_t* out) {
    return guarded([&] {
        if (!tally || !out) return fail(SRWLT_ERR_NULL, "tally or out pointer is NULL");
        if (k < 1) return fail(SRWLT_ERR_DOMAIN, "k must be at least 1");
        *out = static_cast<int64_t>(tally->tally.g(k));
        return SRWLT_OK;
    });
}

srwlt_status srwlt_tally_restricted_once(const srwlt_tally* tally, int64_t bound, int64_t* out) {
    return guarded([&] {
        if (!tally || !out) return fail(SRWLT_ERR_NULL, "tally or out pointer is NULL");
        *out = tally->tally.restricted_once_count(bound);
        return SRWLT_OK;
    });
}

void srwlt_tally_free(srwlt_tally* tally) { delete tally; }

srwlt_status srwlt_run(const char* experiment, const char* config_text, const char* config_name,
                       const char* const* overrides, srwlt_result** out) {
    return guarded([&] {
        if (!experiment || !out) return fail(SRWLT_ERR_NULL, "experiment or out pointer is NULL");
        srwlt::ConfigTree tree;
        if (config_text) tree = srwlt::parse_config(config_text, config_name ? config_name : "config");
        if (overrides) {
            std::vector<std::pair<std::string, std::string>> pairs;
            for (const char* const* p = overrides; *p; p += 2) {
                if (!p[1]) return fail(SRWLT_ERR_CONFIG, std::string("--") + *p + ": missing value");
                pairs.emplace_back(p[0], p[1]);
            }
            tree.merge(srwlt::config_from_pairs(pairs));
        }
        *out = make_result(srwlt::run_experiment(experiment, tree));
        return SRWLT_OK;
    });
}

srwlt_status srwlt_report(const char* const* manifest_texts, const char* const* labels, size_t count,
                          srwlt_result** out) {
    return guarded([&] {
        if (!out || (count > 0 && !manifest_texts)) return fail(SRWLT_ERR_NULL, "manifest or out pointer is NULL");
        std::vector<nlohmann::json> manifests;
        std::vector<std::string> names;
        for (size_t i = 0; i < count; ++i) {
            const std::string label = labels && labels[i] ? labels[i] : "manifest " + std::to_string(i);
            try {
                manifests.push_back(nlohmann::json::parse(manifest_texts[i]));
            } catch (const nlohmann::json::parse_error& e) {
                return fail(SRWLT_ERR_CONFIG, label + ": not a JSON manifest: " + e.what());
            }
            names.push_back(label);
        }
        *out = make_result(srwlt::report(manifests, names));
        return SRWLT_OK;
    });
}

size_t srwlt_experiment_count(void) { return srwlt::experiment_names().size(); }

const char* srwlt_experiment_name(size_t i) {
    const auto& names = srwlt::experiment_names();
    return i < names.size() ? names[i].c_str() : nullptr;
}

const char* srwlt_result_csv(const srwlt_result* result) { return result ? result->csv.c_str() : ""; }

const char* srwlt_result_manifest(const srwlt_result* result) { return result ? result->manifest.c_str() : ""; }

int srwlt_result_checks_failed(const srwlt_result* result) { return result ? result->failed : 0; }

const char* srwlt_result_checks_text(const srwlt_result* result) { return result ? result->checks_text.c_str() : ""; }

void srwlt_result_free(srwlt_result* result) { delete result; }

srwlt_status srwlt_stable_manifest(const char* manifest_text, char** out) {
    return guarded([&] {
        if (!manifest_text || !out) return fail(SRWLT_ERR_NULL, "manifest or out pointer is NULL");
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(manifest_text);
        } catch (const nlohmann::json::parse_error& e) {
            return fail(SRWLT_ERR_CONFIG, std::string("not a JSON manifest: ") + e.what());
        }
        *out = dup_string(srwlt::stable_manifest(doc).dump(2) + "\n");
        return SRWLT_OK;
    });
}

} // extern "C"
