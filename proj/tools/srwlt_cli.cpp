// srwlt-cli: runs experiments through the C API and writes results.csv and
// manifest.json. Exit codes: 0 success, 1 failed check under --assert,
// 2 configuration, domain or resource error, 3 internal error.
#include "srwlt/srwlt.h"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct ResultDeleter {
    void operator()(srwlt_result* r) const { srwlt_result_free(r); }
};
using ResultPtr = std::unique_ptr<srwlt_result, ResultDeleter>;

int exit_code_for(srwlt_status status) {
    switch (status) {
    case SRWLT_OK: return 0;
    case SRWLT_ERR_CONFIG:
    case SRWLT_ERR_RESOURCE:
    case SRWLT_ERR_DOMAIN:
    case SRWLT_ERR_CONTRACT:
    case SRWLT_ERR_NULL: return 2;
    case SRWLT_ERR_INTERNAL: return 3;
    }
    return 3;
}

int report_error(srwlt_status status) {
    std::cerr << "srwlt-cli: " << srwlt_status_name(status) << ": " << srwlt_last_error() << "\n";
    return exit_code_for(status);
}

std::optional<std::string> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    return static_cast<bool>(out);
}

// "--key value", "--key=value" and bare "--flag" (meaning true) from the
// tokens CLI11 did not recognise.
bool collect_pairs(const std::vector<std::string>& extras, std::vector<std::string>& flat) {
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const std::string& tok = extras[i];
        if (tok.rfind("--", 0) != 0 || tok.size() < 3) {
            std::cerr << "srwlt-cli: unexpected argument '" << tok << "'\n";
            return false;
        }
        const std::string body = tok.substr(2);
        const auto eq = body.find('=');
        if (eq != std::string::npos) {
            flat.push_back(body.substr(0, eq));
            flat.push_back(body.substr(eq + 1));
        } else if (i + 1 < extras.size() && extras[i + 1].rfind("--", 0) != 0) {
            flat.push_back(body);
            flat.push_back(extras[++i]);
        } else {
            flat.push_back(body);
            flat.push_back("true");
        }
    }
    return true;
}

void print_checks(const srwlt_result* r) {
    std::istringstream lines(srwlt_result_checks_text(r));
    std::string line;
    while (std::getline(lines, line)) {
        std::vector<std::string> f;
        std::istringstream fields(line);
        std::string part;
        while (std::getline(fields, part, '\t')) f.push_back(part);
        if (f.size() < 4) continue;
        std::string tag = f[1] == "0" ? "" : " [C" + f[1] + "]";
        std::cout << (f[0] == "pass" ? "PASS" : f[0] == "fail" ? "FAIL" : f[0] == "skip" ? "SKIP" : "WARN") << "  "
                  << f[2] << tag << ": " << f[3] << "\n";
    }
}

struct RunOptions {
    std::string seed;
    std::string replicas;
    std::string threads;
    std::string budget;
    std::string config;
    std::string out = ".";
    bool assert_checks = false;
};

int run_subcommand(const std::string& name, const RunOptions& opt, const std::vector<std::string>& extras) {
    std::vector<std::string> flat;
    if (!collect_pairs(extras, flat)) return 2;
    auto add = [&](const char* key, const std::string& v) {
        if (v.empty()) return;
        flat.push_back(key);
        flat.push_back(v);
    };
    add("seed", opt.seed);
    add("replicas", opt.replicas);
    add("threads", opt.threads);
    add("budget", opt.budget);

    std::optional<std::string> config_text;
    if (!opt.config.empty()) {
        config_text = read_file(opt.config);
        if (!config_text) {
            std::cerr << "srwlt-cli: cannot read config file '" << opt.config << "'\n";
            return 2;
        }
    }
    std::vector<const char*> overrides;
    for (const auto& s : flat) overrides.push_back(s.c_str());
    overrides.push_back(nullptr);

    srwlt_result* raw = nullptr;
    const auto status = srwlt_run(name.c_str(), config_text ? config_text->c_str() : nullptr, opt.config.c_str(),
                                  overrides.data(), &raw);
    if (status != SRWLT_OK) return report_error(status);
    ResultPtr result(raw);

    std::error_code ec;
    fs::create_directories(opt.out, ec);
    const fs::path dir(opt.out);
    if (!write_file(dir / "results.csv", srwlt_result_csv(result.get())) ||
        !write_file(dir / "manifest.json", srwlt_result_manifest(result.get()))) {
        std::cerr << "srwlt-cli: cannot write results into '" << opt.out << "'\n";
        return 2;
    }
    print_checks(result.get());
    std::cout << "wrote " << (dir / "results.csv").string() << " and " << (dir / "manifest.json").string() << "\n";
    if (opt.assert_checks && srwlt_result_checks_failed(result.get()) > 0) return 1;
    return 0;
}

int run_report(const std::vector<std::string>& inputs, const std::string& out, bool assert_checks) {
    std::vector<fs::path> files;
    for (const auto& in : inputs) {
        const fs::path p(in);
        if (fs::is_directory(p)) {
            for (const auto& e : fs::recursive_directory_iterator(p)) {
                if (e.is_regular_file() && e.path().filename() == "manifest.json") files.push_back(e.path());
            }
        } else if (fs::is_regular_file(p)) {
            files.push_back(p);
        } else {
            std::cerr << "srwlt-cli: no such manifest or directory '" << in << "'\n";
            return 2;
        }
    }
    std::sort(files.begin(), files.end());
    std::vector<std::string> texts;
    std::vector<std::string> labels;
    for (const auto& f : files) {
        auto text = read_file(f);
        if (!text) {
            std::cerr << "srwlt-cli: cannot read '" << f.string() << "'\n";
            return 2;
        }
        texts.push_back(std::move(*text));
        labels.push_back(f.string());
    }
    std::vector<const char*> text_ptrs;
    std::vector<const char*> label_ptrs;
    for (std::size_t i = 0; i < texts.size(); ++i) {
        text_ptrs.push_back(texts[i].c_str());
        label_ptrs.push_back(labels[i].c_str());
    }
    srwlt_result* raw = nullptr;
    const auto status = srwlt_report(text_ptrs.data(), label_ptrs.data(), texts.size(), &raw);
    if (status != SRWLT_OK) return report_error(status);
    ResultPtr result(raw);
    std::cout << srwlt_result_csv(result.get());
    if (!out.empty()) {
        std::error_code ec;
        fs::create_directories(out, ec);
        if (!write_file(fs::path(out) / "report.csv", srwlt_result_csv(result.get()))) {
            std::cerr << "srwlt-cli: cannot write report into '" << out << "'\n";
            return 2;
        }
    }
    if (assert_checks && srwlt_result_checks_failed(result.get()) > 0) return 1;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simple random walk local-time experiments"};
    app.set_version_flag("--version", std::string(srwlt_version()));
    app.require_subcommand(1);

    RunOptions opt;
    std::vector<CLI::App*> experiment_cmds;
    for (std::size_t i = 0; i < srwlt_experiment_count(); ++i) {
        const std::string name = srwlt_experiment_name(i);
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment (further --key value pairs are "
                                                              "experiment parameters)");
        sub->allow_extras();
        sub->add_option("--seed", opt.seed, "master seed");
        sub->add_option("--replicas", opt.replicas, "number of replicas");
        sub->add_option("--threads", opt.threads, "worker threads (does not change results)");
        sub->add_option("--budget", opt.budget, "step budget per replica");
        sub->add_option("--config", opt.config, "key-value or JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out, "output directory")->capture_default_str();
        sub->add_flag("--assert", opt.assert_checks, "exit 1 when any check fails");
        experiment_cmds.push_back(sub);
    }

    std::vector<std::string> report_inputs;
    std::string report_out;
    bool report_assert = false;
    auto* report = app.add_subcommand("report", "summarise acceptance checks from manifests");
    report->add_option("manifests", report_inputs, "manifest.json files or directories searched recursively");
    report->add_option("--out", report_out, "directory for report.csv");
    report->add_flag("--assert", report_assert, "exit 1 when any criterion fails");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (report->parsed()) return run_report(report_inputs, report_out, report_assert);
    for (auto* sub : experiment_cmds) {
        if (sub->parsed()) return run_subcommand(sub->get_name(), opt, sub->remaining());
    }
    return 2;
}
