#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "posrep/error.hpp"
#include "posrep/pipeline.hpp"

using namespace posrep;

namespace {

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::string format = "both";
};

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--config", o.config, "experiment config (INI)")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "override [run] seed");
    sub->add_option("--out", o.out, "override [run] out");
    sub->add_option("--format", o.format, "report format")->check(CLI::IsMember({"json", "csv", "both"}));
}

int execute(const Options& o, std::optional<Pipeline> pipeline) {
    ExperimentConfig cfg;
    try {
        cfg = parse_config_file(o.config);
        if (pipeline)
            cfg.pipeline = *pipeline;
        if (o.seed)
            cfg.seed = *o.seed;
        if (o.out)
            cfg.out_dir = *o.out;
        cfg.validate();
    } catch (const ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return exit_config_error;
    }

    RunReport rep = run_pipeline(cfg);
    try {
        emit_report(rep, cfg.out_dir, parse_report_format(o.format));
    } catch (const std::exception& e) {
        fmt::print(stderr, "cannot write report: {}\n", e.what());
        return exit_numeric_failure;
    }

    for (const auto& c : rep.checks)
        fmt::print("{:<5} {}/{}: {}\n", c.pass ? "ok" : "FAIL", c.stage, c.name, c.detail);
    if (rep.failure)
        fmt::print("verdict: fail in stage '{}' ({}): {}\n", rep.failure->stage, rep.failure->check,
                   rep.failure->message);
    else
        fmt::print("verdict: pass\n");
    fmt::print("report: {}\n", cfg.out_dir);
    return rep.exit_status();
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Positive representations of complex weights: build, sample and verify"};
    app.require_subcommand(1);
    Options opts;
    std::optional<Pipeline> chosen;

    auto* run = app.add_subcommand("run", "execute the pipeline named in the config");
    add_common(run, opts);
    run->callback([&] { chosen.reset(); });

    const std::pair<const char*, const char*> subs[] = {
        {"moments", "tabulate <x^m>_c up to the cutoff"},
        {"bound", "radial model and dominance check"},
        {"construct", "build t_lambda and certify positivity"},
        {"sample", "draw an ensemble from t_lambda"},
        {"verify", "compare ensemble moments with the oracle"},
        {"pathint", "anharmonic lattice oscillator end to end"},
        {"harmonic", "harmonic lattice with a resonant mode"},
    };
    for (const auto& [name, help] : subs) {
        auto* sub = app.add_subcommand(name, help);
        add_common(sub, opts);
        const std::string n = name;
        sub->callback([&chosen, n] { chosen = parse_pipeline(n); });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : exit_config_error;
    }
    return execute(opts, chosen);
}
