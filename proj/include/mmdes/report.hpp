#pragma once

#include "mmdes/types.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mmdes {

inline constexpr std::string_view kReportFormat = "mmdes-report/1";

/// CCC of one (target, scenario, method) across repetitions.
struct ReportCell {
    Target target = Target::Arousal;
    std::string scenario;
    std::string method;
    std::vector<double> values;
    double mean = 0.0;
    /// Sample standard deviation (n - 1); 0 for a single repetition.
    double std = 0.0;

    bool operator==(const ReportCell&) const = default;
};

/// Validation CCC of one pool member per repetition.
struct RegressorScore {
    Target target = Target::Arousal;
    std::string regressor;
    Modality modality = Modality::Audio;
    std::vector<double> validation_ccc;

    bool operator==(const RegressorScore&) const = default;
};

struct EvaluationReport {
    std::string format = std::string(kReportFormat);
    nlohmann::json config;
    std::vector<Target> targets;
    std::vector<std::string> scenarios;  ///< scenario labels, in run order
    std::vector<std::string> methods;
    std::vector<ReportCell> cells;
    std::vector<RegressorScore> pool;
    std::vector<std::string> diagnostics;

    const ReportCell& cell(Target t, std::string_view scenario, std::string_view method) const;
    bool operator==(const EvaluationReport&) const = default;
};

double mean_of(const std::vector<double>& v);
double sample_std(const std::vector<double>& v);

nlohmann::json report_to_json(const EvaluationReport& report);
EvaluationReport report_from_json(const nlohmann::json& j);

/// "json" (canonical), "csv" (one row per target, scenario, method and
/// repetition) or "markdown" (mean±std tables, methods as columns). Throws
/// ConfigError for any other format.
std::string render_report(const EvaluationReport& report, std::string_view format);

/// Percent change of mean CCC versus the all-modalities row:
/// 100 (ccc_scenario - ccc_full) / |ccc_full|; empty when |ccc_full| < 1e-6.
struct SensitivityCell {
    Target target = Target::Arousal;
    std::string scenario;
    std::string method;
    std::optional<double> percent;
};

double percent_change(double full, double scenario);

/// Throws DataError when the report has no "none" scenario.
std::vector<SensitivityCell> sensitivity_summary(const EvaluationReport& report);
std::string render_sensitivity(const EvaluationReport& report, const std::vector<SensitivityCell>& cells);

}  // namespace mmdes
