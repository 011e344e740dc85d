/* C interface to the srwlt library: exact oracles, walk sampling, visit
 * tallies and named experiments. All functions return an srwlt_status; on
 * failure srwlt_last_error() describes the problem (thread-local, valid until
 * the next call on the same thread). Strings and handles returned through out
 * parameters are owned by the caller and released with the matching free. */
#ifndef SRWLT_SRWLT_H
#define SRWLT_SRWLT_H

#include <stddef.h>
#include <stdint.h>

#if defined(SRWLT_BUILDING_LIBRARY)
#define SRWLT_API __attribute__((visibility("default")))
#else
#define SRWLT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum srwlt_status {
    SRWLT_OK = 0,
    SRWLT_ERR_DOMAIN = 1,   /* argument outside the mathematical domain */
    SRWLT_ERR_CONTRACT = 2, /* precondition violated (e.g. non-adjacent site) */
    SRWLT_ERR_CONFIG = 3,   /* malformed or unknown configuration */
    SRWLT_ERR_RESOURCE = 4, /* a documented size cap was exceeded */
    SRWLT_ERR_INTERNAL = 5,
    SRWLT_ERR_NULL = 6 /* a required pointer argument was NULL */
} srwlt_status;

typedef enum srwlt_law_kind {
    SRWLT_LAW_SIMPLE_SYMMETRIC = 0,
    SRWLT_LAW_AVOID_ZERO = 1,
    SRWLT_LAW_CEILING_STAY = 2 /* uses the ceiling argument */
} srwlt_law_kind;

typedef struct srwlt_result srwlt_result;
typedef struct srwlt_walk srwlt_walk;
typedef struct srwlt_tally srwlt_tally;

SRWLT_API const char* srwlt_version(void);
SRWLT_API const char* srwlt_last_error(void);
SRWLT_API const char* srwlt_status_name(srwlt_status status);
SRWLT_API void srwlt_string_free(char* s);

/* Exact values are returned as a binary64 and, when exact_out is not NULL, as
 * a "p/q" string to be released with srwlt_string_free. */
SRWLT_API srwlt_status srwlt_step_probabilities(srwlt_law_kind law, int64_t ceiling, int64_t x, double* p_down,
                                                double* p_up);
SRWLT_API srwlt_status srwlt_height_pmf(int64_t k, double* value, char** exact_out);
SRWLT_API srwlt_status srwlt_height_ccdf(int64_t k, double* value, char** exact_out);
SRWLT_API srwlt_status srwlt_stay_above(int64_t a, int64_t b, double* value, char** exact_out);
SRWLT_API srwlt_status srwlt_chain_hitting(srwlt_law_kind law, int64_t ceiling, int64_t floor_site,
                                           int64_t ceiling_site, int64_t start, int64_t target, double* value,
                                           char** exact_out);
SRWLT_API srwlt_status srwlt_binomial_moment_dp(int64_t s, int64_t k, int restricted, double* value);
/* E[g_k(n)] by enumeration of all 2^n paths (n <= 24). */
SRWLT_API srwlt_status srwlt_enumerate_expectation(int n, int k, double* value, char** exact_out);

/* A walk under one law, started at start, driven by stream (seed, stream). */
SRWLT_API srwlt_status srwlt_walk_create(srwlt_law_kind law, int64_t ceiling, int64_t start, uint64_t seed,
                                         uint64_t stream, srwlt_walk** out);
/* Takes one step and writes the new position. Leaving the law's domain is a
 * domain error. */
SRWLT_API srwlt_status srwlt_walk_step(srwlt_walk* walk, int64_t* position);
SRWLT_API void srwlt_walk_free(srwlt_walk* walk);

SRWLT_API srwlt_status srwlt_tally_create(uint32_t k_max, srwlt_tally** out);
SRWLT_API srwlt_status srwlt_tally_record(srwlt_tally* tally, int64_t site);
SRWLT_API srwlt_status srwlt_tally_once_count(const srwlt_tally* tally, int64_t* out);
SRWLT_API srwlt_status srwlt_tally_g(const srwlt_tally* tally, uint64_t k, int64_t* out);
SRWLT_API srwlt_status srwlt_tally_restricted_once(const srwlt_tally* tally, int64_t bound, int64_t* out);
SRWLT_API void srwlt_tally_free(srwlt_tally* tally);

/* Runs a named experiment. config_text may be NULL, key-value text or JSON;
 * config_name labels it in diagnostics. overrides is a NULL-terminated array
 * of alternating key, value strings applied on top (command-line flags). */
SRWLT_API srwlt_status srwlt_run(const char* experiment, const char* config_text, const char* config_name,
                                 const char* const* overrides, srwlt_result** out);
/* Builds the acceptance summary from manifest JSON texts. */
SRWLT_API srwlt_status srwlt_report(const char* const* manifest_texts, const char* const* labels, size_t count,
                                    srwlt_result** out);
/* Number of experiment names, and the i-th name. */
SRWLT_API size_t srwlt_experiment_count(void);
SRWLT_API const char* srwlt_experiment_name(size_t i);

SRWLT_API const char* srwlt_result_csv(const srwlt_result* result);
SRWLT_API const char* srwlt_result_manifest(const srwlt_result* result);
/* Checks with status fail (or warn, in reports). */
SRWLT_API int srwlt_result_checks_failed(const srwlt_result* result);
/* One line per check: "status<TAB>criterion<TAB>name<TAB>detail". */
SRWLT_API const char* srwlt_result_checks_text(const srwlt_result* result);
SRWLT_API void srwlt_result_free(srwlt_result* result);

/* The manifest JSON with its volatile subtree removed. */
SRWLT_API srwlt_status srwlt_stable_manifest(const char* manifest_text, char** out);

#ifdef __cplusplus
}
#endif

#endif
