#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "posrep/config.hpp"
#include "posrep/sampler.hpp"

namespace posrep {

enum ExitStatus : int { exit_pass = 0, exit_check_failure = 1, exit_config_error = 2, exit_numeric_failure = 3 };

struct CheckResult {
    std::string stage;
    std::string name;
    bool pass = true;
    std::string detail;
};

struct MomentRow {
    MultiIndex index;
    cplx oracle;
    std::optional<MomentEstimate> estimate;
    double pull_re = 0.0;
    double pull_im = 0.0;
};

struct Failure {
    std::string stage;
    std::string check;
    std::string message;
    int status = exit_check_failure;
};

struct RunReport {
    ExperimentConfig config;
    /// stage name -> stage results, in execution order
    nlohmann::ordered_json stages = nlohmann::ordered_json::object();
    std::vector<CheckResult> checks;
    std::vector<MomentRow> moments;
    /// files written by the run, relative to the output directory
    std::vector<std::string> artifacts;
    std::vector<std::pair<std::string, double>> timings;
    std::optional<Failure> failure;

    bool pass() const { return !failure; }
    int exit_status() const { return failure ? failure->status : exit_pass; }

    /// Deterministic part of the report (no timings).
    nlohmann::ordered_json to_json() const;
};

/// Run the configured pipeline. Stage failures are recorded in the report,
/// never thrown; sample artifacts are written to config.out_dir.
RunReport run_pipeline(const ExperimentConfig& config);

enum class ReportFormat { json, csv, both };

ReportFormat parse_report_format(const std::string& name);

/// report.json and timings.json (json), moments.csv (csv). Byte-stable for a
/// given report.
void emit_report(const RunReport& report, const std::string& dir, ReportFormat format = ReportFormat::both);

/// moments.csv contents: index, oracle, estimate, standard errors, pulls.
std::string moments_csv(const RunReport& report);

} // namespace posrep
