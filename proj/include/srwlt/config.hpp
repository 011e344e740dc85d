#pragma once

#include <json.hpp>

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace srwlt {

/// Parameter tree plus where each leaf came from ("run.cfg:12", "--seed"),
/// used to point diagnostics at the offending line or flag.
struct ConfigTree {
    nlohmann::json root = nlohmann::json::object();
    std::map<std::string, std::string> origin;

    /// Sets a dotted key, creating intermediate objects.
    void set(const std::string& dotted_key, nlohmann::json value, const std::string& where);
    /// Copies every leaf of other over this tree.
    void merge(const ConfigTree& other);
};

/// Key-value text: one `key = value` per line, dotted keys for nesting, `#`
/// starts a comment. Values are JSON scalars or arrays (`[2, 10, 100]`); bare
/// words are strings. Text whose first non-blank character is `{` is read as
/// JSON. Malformed input raises ConfigError naming the line.
ConfigTree parse_config(const std::string& text, const std::string& source_name);

/// Flattened `--key value` pairs from the command line. Comma-separated values
/// become arrays.
ConfigTree config_from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs);

/// Typed, tracked access to a ConfigTree. Every key read is recorded; finish()
/// rejects whatever was not read.
class Params {
public:
    explicit Params(const ConfigTree& tree) : tree_(tree) {}

    bool has(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback, std::int64_t min_value = INT64_MIN);
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback);
    double get_double(const std::string& key, double fallback);
    bool get_bool(const std::string& key, bool fallback);
    std::string get_string(const std::string& key, const std::string& fallback,
                           const std::vector<std::string>& allowed = {});
    std::vector<std::int64_t> get_int_list(const std::string& key, const std::vector<std::int64_t>& fallback,
                                           std::int64_t min_value = INT64_MIN);
    std::vector<double> get_double_list(const std::string& key, const std::vector<double>& fallback);

    /// Marks keys that are accepted but handled elsewhere.
    void ignore(const std::string& key);
    /// Throws ConfigError listing keys never read.
    void finish() const;
    /// The effective configuration: every key read with the value used.
    const nlohmann::json& effective() const noexcept { return effective_; }

private:
    const nlohmann::json* find(const std::string& key) const;
    [[noreturn]] void fail(const std::string& key, const std::string& what) const;
    void record(const std::string& key, const nlohmann::json& value);

    const ConfigTree& tree_;
    std::set<std::string> used_;
    nlohmann::json effective_ = nlohmann::json::object();
};

} // namespace srwlt
