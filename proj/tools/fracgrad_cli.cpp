// fracgrad_cli <experiment|all|config> [options]
//
// Exit status: 0 all verdicts PASS or OBSERVE, 1 some FAIL, 2 bad usage,
// bad configuration or a violated precondition.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "fracgrad/config.hpp"
#include "fracgrad/suite.hpp"

namespace {

using fracgrad::Config;

struct Options {
    std::string config;
    std::string out;
    std::vector<std::string> overrides;
    std::optional<long> seed;
    std::optional<long> threads;
    bool quiet = false;
    // Shortcuts for keys of the selected experiment's section.
    std::map<std::string, std::string> shortcuts;
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("-c,--config", o.config, "INI configuration file (default: built-in defaults)");
    sub->add_option("-o,--out", o.out, "output directory (default: run.out, then $FRACGRAD_OUT, then ./fracgrad_out)");
    sub->add_option("--set", o.overrides, "override, section.key=value (bare key=value targets this experiment)")
        ->take_all();
    sub->add_option("--seed", o.seed, "random seed (run.seed)");
    sub->add_option("--threads", o.threads, "worker thread cap, 0 = runtime default (run.threads)");
    sub->add_flag("-q,--quiet", o.quiet, "only print the final status line");
}

void add_shortcuts(CLI::App* sub, Options& o) {
    for (const char* key : {"d", "n", "alpha", "beta", "s", "t"}) {
        sub->add_option_function<std::string>(
            std::string("--") + key, [&o, key](const std::string& v) { o.shortcuts[key] = v; },
            std::string("shortcut for <experiment>.") + key);
    }
}

Config resolve(const std::string& experiment, const Options& o) {
    Config c = o.config.empty() ? Config() : Config::from_file(o.config);
    for (const auto& s : o.overrides) {
        const auto eq = s.find('=');
        const bool bare = eq != std::string::npos && s.substr(0, eq).find('.') == std::string::npos;
        fracgrad::require(!(bare && experiment == "all"), "override '" + s + "' needs a section under 'all'");
        c.apply_override(bare ? experiment + "." + s : s);
    }
    for (const auto& [k, v] : o.shortcuts) c.set(experiment + "." + k, v, "--" + k);
    if (o.seed) c.set("run.seed", std::to_string(*o.seed), "--seed");
    if (o.threads) c.set("run.threads", std::to_string(*o.threads), "--threads");
    return c;
}

std::filesystem::path output_dir(const Config& c, const Options& o) {
    if (!o.out.empty()) return o.out;
    if (!c.word("run.out").empty()) return c.word("run.out");
    if (const char* env = std::getenv("FRACGRAD_OUT"); env && *env) return env;
    return "fracgrad_out";
}

int run(const std::string& experiment, const Options& o) {
    const Config c = resolve(experiment, o);
    const long threads = c.integer("run.threads");
    fracgrad::require(threads >= 0, "run.threads must be >= 0");
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(static_cast<int>(threads));
#endif
    const auto dir = output_dir(c, o);
    const std::vector<std::string> names =
        experiment == "all" ? fracgrad::experiment_names() : std::vector<std::string>{experiment};
    int failed = 0;
    for (const auto& name : names) {
        const auto t0 = std::chrono::steady_clock::now();
        auto outcomes = fracgrad::run_experiment(name, c);
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        for (auto& oc : outcomes) {
            fracgrad::write_outcome(oc, dir);
            const auto v = oc.report.verdict;
            failed += v == fracgrad::Verdict::fail;
            if (!o.quiet) {
                std::cout << oc.stem << ": " << fracgrad::to_string(v);
                for (const auto& ch : oc.report.checks)
                    if (ch.binding && !ch.pass)
                        std::cout << "  [" << ch.name << " = " << ch.value << ", needs " << ch.relation << ' '
                                  << ch.threshold << ']';
                std::cout << '\n';
            }
        }
        if (!o.quiet) std::cout << "  (" << name << " took " << secs << " s)\n";
    }
    std::cout << (failed ? "FAIL" : "OK") << ": " << failed << " failing report(s); output in " << dir.string()
              << '\n';
    return failed ? 1 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional-gradient toolkit: potentials, Lorentz norms, content bounds and verification runs"};
    app.require_subcommand(1);
    app.set_version_flag("--version", fracgrad::tool_version);

    Options opts;
    std::string chosen;
    for (const auto& name : fracgrad::experiment_names()) {
        auto* sub = app.add_subcommand(name, "run the '" + name + "' experiment");
        add_common(sub, opts);
        add_shortcuts(sub, opts);
        sub->callback([&chosen, name] { chosen = name; });
    }
    auto* all = app.add_subcommand("all", "run every experiment in configuration order");
    add_common(all, opts);
    all->callback([&chosen] { chosen = "all"; });
    auto* show = app.add_subcommand("config", "print the resolved configuration as INI");
    show->add_option("-c,--config", opts.config, "INI configuration file");
    show->add_option("--set", opts.overrides, "override, section.key=value")->take_all();
    show->callback([&chosen] { chosen = "config"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (chosen == "config") {
            std::cout << resolve("all", opts).dump();
            return 0;
        }
        return run(chosen, opts);
    } catch (const fracgrad::precondition_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
