#include "srwlt/config.hpp"

#include "srwlt/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <sstream>

namespace srwlt {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string normalize_key(std::string key) {
    std::replace(key.begin(), key.end(), '-', '_');
    return key;
}

bool valid_key(const std::string& key) {
    if (key.empty() || key.front() == '.' || key.back() == '.') return false;
    if (key.find("..") != std::string::npos) return false;
    return std::all_of(key.begin(), key.end(), [](unsigned char c) { return std::isalnum(c) || c == '_' || c == '.'; });
}

bool bare_word(const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '-' || c == '.' || c == '/' || c == ':' || c == '+';
    });
}

std::vector<std::string> split_dots(const std::string& key) {
    std::vector<std::string> parts;
    std::stringstream ss(key);
    std::string part;
    while (std::getline(ss, part, '.')) parts.push_back(part);
    return parts;
}

// strips a trailing comment, leaving '#' inside double quotes alone
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

void for_each_leaf(const json& node, const std::string& prefix,
                   const std::function<void(const std::string&, const json&)>& fn) {
    if (node.is_object()) {
        for (auto it = node.begin(); it != node.end(); ++it) {
            for_each_leaf(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), fn);
        }
        return;
    }
    fn(prefix, node);
}

json parse_value(const std::string& raw) {
    if (bare_word(raw) && raw != "true" && raw != "false" && raw != "null" &&
        !(std::isdigit(static_cast<unsigned char>(raw.front())) || raw.front() == '-' || raw.front() == '+')) {
        return raw;
    }
    try {
        return json::parse(raw);
    } catch (const json::parse_error&) {
        if (bare_word(raw)) return raw;
        throw;
    }
}

} // namespace

void ConfigTree::set(const std::string& dotted_key, json value, const std::string& where) {
    const auto key = normalize_key(dotted_key);
    if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + dotted_key + "'");
    const auto parts = split_dots(key);
    json* node = &root;
    std::string path;
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        path += (path.empty() ? "" : ".") + parts[i];
        json& child = (*node)[parts[i]];
        if (child.is_null()) child = json::object();
        if (!child.is_object()) {
            throw ConfigError(where + ": key '" + key + "' conflicts with the value of '" + path + "'");
        }
        node = &child;
    }
    json& leaf = (*node)[parts.back()];
    if (leaf.is_object() && !leaf.empty()) {
        throw ConfigError(where + ": key '" + key + "' conflicts with nested keys below it");
    }
    leaf = std::move(value);
    origin[key] = where;
}

void ConfigTree::merge(const ConfigTree& other) {
    for_each_leaf(other.root, "", [&](const std::string& key, const json& value) {
        if (key.empty()) return;
        const auto it = other.origin.find(key);
        set(key, value, it == other.origin.end() ? std::string("config") : it->second);
    });
}

ConfigTree parse_config(const std::string& text, const std::string& source_name) {
    ConfigTree tree;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json doc;
        try {
            doc = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError(source_name + ": malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
        }
        for_each_leaf(doc, "", [&](const std::string& key, const json& value) {
            if (!key.empty()) tree.set(key, value, source_name);
        });
        return tree;
    }

    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string where = source_name + ":" + std::to_string(lineno);
        const std::string body = trim(strip_comment(line));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value', got '" + body + "'");
        const std::string key = normalize_key(trim(body.substr(0, eq)));
        const std::string raw = trim(body.substr(eq + 1));
        if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + key + "'");
        if (raw.empty()) throw ConfigError(where + ": field '" + key + "': missing value");
        if (tree.origin.count(key)) {
            throw ConfigError(where + ": field '" + key + "' repeated (first set at " + tree.origin[key] + ")");
        }
        json value;
        try {
            value = parse_value(raw);
        } catch (const json::parse_error&) {
            throw ConfigError(where + ": field '" + key + "': cannot parse value '" + raw + "'");
        }
        if (value.is_object()) throw ConfigError(where + ": field '" + key + "': use dotted keys instead of objects");
        tree.set(key, std::move(value), where);
    }
    return tree;
}

ConfigTree config_from_pairs(const std::vector<std::pair<std::string, std::string>>& pairs) {
    ConfigTree tree;
    for (const auto& [raw_key, raw_value] : pairs) {
        const std::string key = normalize_key(raw_key);
        const std::string where = "--" + raw_key;
        const std::string raw = trim(raw_value);
        json value;
        try {
            if (raw.find(',') != std::string::npos && raw.front() != '[') {
                value = json::array();
                std::stringstream ss(raw);
                std::string item;
                while (std::getline(ss, item, ',')) value.push_back(parse_value(trim(item)));
            } else {
                value = parse_value(raw);
            }
        } catch (const json::parse_error&) {
            throw ConfigError(where + ": cannot parse value '" + raw + "'");
        }
        tree.set(key, std::move(value), where);
    }
    return tree;
}

const json* Params::find(const std::string& key) const {
    const json* node = &tree_.root;
    for (const auto& part : split_dots(key)) {
        if (!node->is_object()) return nullptr;
        const auto it = node->find(part);
        if (it == node->end()) return nullptr;
        node = &*it;
    }
    return node;
}

bool Params::has(const std::string& key) const { return find(key) != nullptr; }

void Params::fail(const std::string& key, const std::string& what) const {
    const auto it = tree_.origin.find(key);
    const std::string where = it == tree_.origin.end() ? std::string("config") : it->second;
    throw ConfigError(where + ": field '" + key + "': " + what);
}

void Params::record(const std::string& key, const json& value) {
    used_.insert(key);
    json* node = &effective_;
    const auto parts = split_dots(key);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
    (*node)[parts.back()] = value;
}

void Params::ignore(const std::string& key) { used_.insert(key); }

std::int64_t Params::get_int(const std::string& key, std::int64_t fallback, std::int64_t min_value) {
    std::int64_t v = fallback;
    if (const json* j = find(key)) {
        if (j->is_number_integer()) {
            v = j->get<std::int64_t>();
        } else if (j->is_number_float() && std::floor(j->get<double>()) == j->get<double>() &&
                   std::fabs(j->get<double>()) < 9.0e15) {
            v = static_cast<std::int64_t>(j->get<double>());
        } else {
            fail(key, "expected an integer, got " + j->dump());
        }
        if (v < min_value) fail(key, "must be at least " + std::to_string(min_value) + ", got " + std::to_string(v));
    }
    record(key, v);
    return v;
}

std::uint64_t Params::get_uint(const std::string& key, std::uint64_t fallback) {
    std::uint64_t v = fallback;
    if (const json* j = find(key)) {
        if (j->is_number_unsigned()) {
            v = j->get<std::uint64_t>();
        } else if (j->is_number_integer() && j->get<std::int64_t>() >= 0) {
            v = static_cast<std::uint64_t>(j->get<std::int64_t>());
        } else if (j->is_number_float() && j->get<double>() >= 0.0 &&
                   std::floor(j->get<double>()) == j->get<double>() && j->get<double>() < 1.8e19) {
            v = static_cast<std::uint64_t>(j->get<double>());
        } else {
            fail(key, "expected a nonnegative integer, got " + j->dump());
        }
    }
    record(key, v);
    return v;
}

double Params::get_double(const std::string& key, double fallback) {
    double v = fallback;
    if (const json* j = find(key)) {
        if (!j->is_number()) fail(key, "expected a number, got " + j->dump());
        v = j->get<double>();
        if (!std::isfinite(v)) fail(key, "must be finite");
    }
    record(key, v);
    return v;
}

bool Params::get_bool(const std::string& key, bool fallback) {
    bool v = fallback;
    if (const json* j = find(key)) {
        if (j->is_boolean()) {
            v = j->get<bool>();
        } else if (j->is_number_integer() && (j->get<std::int64_t>() == 0 || j->get<std::int64_t>() == 1)) {
            v = j->get<std::int64_t>() == 1;
        } else {
            fail(key, "expected true or false, got " + j->dump());
        }
    }
    record(key, v);
    return v;
}

std::string Params::get_string(const std::string& key, const std::string& fallback,
                               const std::vector<std::string>& allowed) {
    std::string v = fallback;
    if (const json* j = find(key)) {
        if (!j->is_string()) fail(key, "expected a string, got " + j->dump());
        v = j->get<std::string>();
        if (!allowed.empty() && std::find(allowed.begin(), allowed.end(), v) == allowed.end()) {
            std::string list;
            for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
            fail(key, "'" + v + "' is not one of {" + list + "}");
        }
    }
    record(key, v);
    return v;
}

std::vector<std::int64_t> Params::get_int_list(const std::string& key, const std::vector<std::int64_t>& fallback,
                                               std::int64_t min_value) {
    std::vector<std::int64_t> v = fallback;
    if (const json* j = find(key)) {
        v.clear();
        const json items = j->is_array() ? *j : json::array({*j});
        for (const auto& item : items) {
            if (!item.is_number_integer()) fail(key, "expected integers, got " + item.dump());
            const auto x = item.get<std::int64_t>();
            if (x < min_value) fail(key, "entries must be at least " + std::to_string(min_value));
            v.push_back(x);
        }
    }
    record(key, v);
    return v;
}

std::vector<double> Params::get_double_list(const std::string& key, const std::vector<double>& fallback) {
    std::vector<double> v = fallback;
    if (const json* j = find(key)) {
        v.clear();
        const json items = j->is_array() ? *j : json::array({*j});
        for (const auto& item : items) {
            if (!item.is_number()) fail(key, "expected numbers, got " + item.dump());
            v.push_back(item.get<double>());
        }
    }
    record(key, v);
    return v;
}

void Params::finish() const {
    std::vector<std::string> unknown;
    for_each_leaf(tree_.root, "", [&](const std::string& key, const json&) {
        if (!key.empty() && !used_.count(key)) unknown.push_back(key);
    });
    if (unknown.empty()) return;
    const auto it = tree_.origin.find(unknown.front());
    const std::string where = it == tree_.origin.end() ? std::string("config") : it->second;
    std::string list;
    for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
    throw ConfigError(where + ": unknown key" + (unknown.size() > 1 ? "s '" : " '") + list + "'");
}

} // namespace srwlt
