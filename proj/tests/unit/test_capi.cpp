#include "srwlt/srwlt.h"

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>

TEST_CASE("scalar oracles through the C interface") {
    double down = -1;
    double up = -1;
    CHECK(srwlt_step_probabilities(SRWLT_LAW_AVOID_ZERO, 0, 1, &down, &up) == SRWLT_OK);
    CHECK(down == 0.0);
    CHECK(up == 1.0);
    CHECK(srwlt_step_probabilities(SRWLT_LAW_CEILING_STAY, 5, 5, &down, &up) == SRWLT_OK);
    CHECK(down == 1.0);
    CHECK(srwlt_step_probabilities(SRWLT_LAW_AVOID_ZERO, 0, 0, &down, &up) == SRWLT_ERR_DOMAIN);
    CHECK(std::string(srwlt_last_error()).find("0") != std::string::npos);
    CHECK(srwlt_step_probabilities(SRWLT_LAW_AVOID_ZERO, 0, 1, nullptr, &up) == SRWLT_ERR_NULL);

    double v = 0;
    char* text = nullptr;
    CHECK(srwlt_stay_above(1, 3, &v, &text) == SRWLT_OK);
    CHECK(std::string(text) == "3/4");
    srwlt_string_free(text);
    CHECK(srwlt_stay_above(3, 1, &v, nullptr) == SRWLT_ERR_DOMAIN);

    CHECK(srwlt_height_pmf(2, &v, &text) == SRWLT_OK);
    CHECK(std::string(text) == "1/6");
    srwlt_string_free(text);
    CHECK(srwlt_height_ccdf(4, &v, nullptr) == SRWLT_OK);
    CHECK(v == 0.25);

    CHECK(srwlt_chain_hitting(SRWLT_LAW_SIMPLE_SYMMETRIC, 0, 8, 32, 16, 32, &v, &text) == SRWLT_OK);
    CHECK(std::string(text) == "1/3");
    srwlt_string_free(text);

    CHECK(srwlt_binomial_moment_dp(3, 1, 0, &v) == SRWLT_OK);
    CHECK(v == 1.5);
    CHECK(srwlt_binomial_moment_dp(20000, 1, 0, &v) == SRWLT_ERR_RESOURCE);

    CHECK(srwlt_enumerate_expectation(10, 1, &v, &text) == SRWLT_OK);
    CHECK(std::string(text) == "2/1");
    srwlt_string_free(text);
    CHECK(srwlt_enumerate_expectation(40, 1, &v, nullptr) == SRWLT_ERR_RESOURCE);
}

TEST_CASE("walk and tally handles") {
    srwlt_walk* w = nullptr;
    REQUIRE(srwlt_walk_create(SRWLT_LAW_AVOID_ZERO, 0, 1, 42, 0, &w) == SRWLT_OK);
    srwlt_tally* t = nullptr;
    REQUIRE(srwlt_tally_create(64, &t) == SRWLT_OK);
    CHECK(srwlt_tally_record(t, 1) == SRWLT_OK);
    int64_t pos = 0;
    CHECK(srwlt_walk_step(w, &pos) == SRWLT_OK);
    CHECK(pos == 2);
    CHECK(srwlt_tally_record(t, pos) == SRWLT_OK);
    for (int i = 0; i < 1000; ++i) {
        REQUIRE(srwlt_walk_step(w, &pos) == SRWLT_OK);
        CHECK(pos >= 1);
        REQUIRE(srwlt_tally_record(t, pos) == SRWLT_OK);
    }
    int64_t once = -1;
    int64_t g1 = -1;
    CHECK(srwlt_tally_once_count(t, &once) == SRWLT_OK);
    CHECK(srwlt_tally_g(t, 1, &g1) == SRWLT_OK);
    CHECK(once == g1);
    int64_t restricted = -1;
    CHECK(srwlt_tally_restricted_once(t, 0, &restricted) == SRWLT_OK);
    CHECK(restricted == 0);
    CHECK(srwlt_tally_record(t, pos + 5) == SRWLT_ERR_CONTRACT);
    srwlt_tally_free(t);
    srwlt_walk_free(w);

    // same seed and stream give the same path
    srwlt_walk* a = nullptr;
    srwlt_walk* b = nullptr;
    REQUIRE(srwlt_walk_create(SRWLT_LAW_SIMPLE_SYMMETRIC, 0, 0, 7, 3, &a) == SRWLT_OK);
    REQUIRE(srwlt_walk_create(SRWLT_LAW_SIMPLE_SYMMETRIC, 0, 0, 7, 3, &b) == SRWLT_OK);
    for (int i = 0; i < 500; ++i) {
        int64_t pa = 0;
        int64_t pb = 0;
        srwlt_walk_step(a, &pa);
        srwlt_walk_step(b, &pb);
        CHECK(pa == pb);
    }
    srwlt_walk_free(a);
    srwlt_walk_free(b);

    CHECK(srwlt_walk_create(SRWLT_LAW_AVOID_ZERO, 0, 0, 1, 0, &w) == SRWLT_ERR_DOMAIN);
    CHECK(srwlt_walk_create(SRWLT_LAW_CEILING_STAY, 0, 1, 1, 0, &w) == SRWLT_ERR_DOMAIN);
    srwlt_walk_free(nullptr);
    srwlt_tally_free(nullptr);
}

TEST_CASE("experiments through the C interface") {
    CHECK(srwlt_experiment_count() == 9);
    CHECK(std::string(srwlt_experiment_name(0)) == "exact-enumerate");
    CHECK(srwlt_experiment_name(99) == nullptr);

    const char* overrides[] = {"n", "6", nullptr};
    srwlt_result* r = nullptr;
    REQUIRE(srwlt_run("exact-enumerate", "seed = 3\n", "inline.cfg", overrides, &r) == SRWLT_OK);
    CHECK(srwlt_result_checks_failed(r) == 0);
    CHECK(std::string(srwlt_result_csv(r)).find("6,1,2/1") != std::string::npos);
    const std::string manifest = srwlt_result_manifest(r);
    CHECK(manifest.find("\"volatile\"") != std::string::npos);
    CHECK(std::string(srwlt_result_checks_text(r)).rfind("pass\t1\tnewman_identity\t", 0) == 0);

    char* stable = nullptr;
    REQUIRE(srwlt_stable_manifest(manifest.c_str(), &stable) == SRWLT_OK);
    CHECK(std::string(stable).find("volatile") == std::string::npos);
    srwlt_string_free(stable);

    const char* texts[] = {manifest.c_str()};
    const char* labels[] = {"m"};
    srwlt_result* rep = nullptr;
    REQUIRE(srwlt_report(texts, labels, 1, &rep) == SRWLT_OK);
    CHECK(srwlt_result_checks_failed(rep) == 0);
    CHECK(std::string(srwlt_result_csv(rep)).find("1,pass,") != std::string::npos);
    srwlt_result_free(rep);
    srwlt_result_free(r);

    r = nullptr;
    CHECK(srwlt_run("exact-enumerate", "seed = \n", "bad.cfg", nullptr, &r) == SRWLT_ERR_CONFIG);
    CHECK(std::string(srwlt_last_error()).find("bad.cfg:1") != std::string::npos);
    CHECK(r == nullptr);
    const char* unknown[] = {"bogus", "1", nullptr};
    CHECK(srwlt_run("hitting", nullptr, "", unknown, &r) == SRWLT_ERR_CONFIG);
    CHECK(srwlt_run("nope", nullptr, "", nullptr, &r) == SRWLT_ERR_CONFIG);
    CHECK(srwlt_run(nullptr, nullptr, "", nullptr, &r) == SRWLT_ERR_NULL);
    const char* big[] = {"n", "30", nullptr};
    CHECK(srwlt_run("exact-enumerate", nullptr, "", big, &r) == SRWLT_ERR_RESOURCE);
    CHECK(std::string(srwlt_last_error()).find("cap") != std::string::npos);

    const char* broken[] = {"{not json"};
    CHECK(srwlt_report(broken, labels, 1, &rep) == SRWLT_ERR_CONFIG);
    CHECK(std::string(srwlt_status_name(SRWLT_ERR_CONFIG)).size() > 0);
}
