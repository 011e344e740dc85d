#pragma once

#include "srwlt/config.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace srwlt {

inline constexpr const char* kManifestSchema = "srwlt-manifest/1";

/// Version string compiled into manifests; report() warns on mismatch.
const char* code_version() noexcept;

enum class CheckStatus { Pass, Fail, Skip, Warn };
std::string to_string(CheckStatus status);
CheckStatus check_status_from_string(const std::string& s);

/// One verdict recorded in a manifest. criterion is the acceptance criterion
/// number (1..12) the check belongs to, 0 for auxiliary checks.
struct Check {
    std::string name;
    int criterion = 0;
    CheckStatus status = CheckStatus::Pass;
    std::string detail;
};

struct RunResult {
    std::string experiment;
    std::string csv;
    nlohmann::json manifest;
    std::vector<Check> checks;
    int failed() const noexcept;
};

/// Names accepted by run_experiment, in CLI order ("report" is separate).
const std::vector<std::string>& experiment_names();

/// Runs a named experiment. Every key of config must be understood by the
/// experiment (ConfigError otherwise). Common keys: seed, replicas, threads,
/// budget. threads only affects scheduling and is recorded under the
/// manifest's "volatile" subtree with the wall clock; everything else in the
/// manifest and the CSV is a function of the remaining config alone.
RunResult run_experiment(const std::string& name, const ConfigTree& config);

/// Summary over manifests: one row per acceptance criterion found (conjunction
/// of its checks), one row per auxiliary check, and a warning row for any
/// manifest written by a different code version or schema.
RunResult report(const std::vector<nlohmann::json>& manifests, const std::vector<std::string>& labels);

/// Manifest with the volatile subtree removed, for reproducibility diffs.
nlohmann::json stable_manifest(const nlohmann::json& manifest);

/// %.17g rendering used for every binary64 in CSV output.
std::string format_double(double v);

} // namespace srwlt
