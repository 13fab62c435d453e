#include "mmdes/report.hpp"

#include "mmdes/dataset_io.hpp"
#include "mmdes/error.hpp"
#include "mmdes/imputation.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace mmdes {

using nlohmann::json;

const ReportCell& EvaluationReport::cell(Target t, std::string_view scenario, std::string_view method) const {
    for (const auto& c : cells) {
        if (c.target == t && c.scenario == scenario && c.method == method) return c;
    }
    throw DataError("report has no cell (" + std::string(to_string(t)) + ", " + std::string(scenario) + ", " +
                    std::string(method) + ")");
}

double mean_of(const std::vector<double>& v) {
    if (v.empty()) return 0.0;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

json report_to_json(const EvaluationReport& r) {
    json j;
    j["format"] = r.format;
    j["config"] = r.config;
    j["targets"] = json::array();
    for (Target t : r.targets) j["targets"].push_back(to_string(t));
    j["scenarios"] = r.scenarios;
    j["methods"] = r.methods;
    j["cells"] = json::array();
    for (const auto& c : r.cells) {
        j["cells"].push_back({{"target", to_string(c.target)},
                              {"scenario", c.scenario},
                              {"method", c.method},
                              {"values", c.values},
                              {"mean", c.mean},
                              {"std", c.std}});
    }
    j["pool"] = json::array();
    for (const auto& p : r.pool) {
        j["pool"].push_back({{"target", to_string(p.target)},
                             {"regressor", p.regressor},
                             {"modality", to_string(p.modality)},
                             {"validation_ccc", p.validation_ccc}});
    }
    j["diagnostics"] = r.diagnostics;
    return j;
}

EvaluationReport report_from_json(const json& j) {
    try {
        EvaluationReport r;
        r.format = j.at("format").get<std::string>();
        if (r.format != kReportFormat) throw DataError("unsupported report format '" + r.format + "'");
        r.config = j.at("config");
        for (const auto& t : j.at("targets")) r.targets.push_back(parse_target(t.get<std::string>()));
        r.scenarios = j.at("scenarios").get<std::vector<std::string>>();
        r.methods = j.at("methods").get<std::vector<std::string>>();
        for (const auto& c : j.at("cells")) {
            r.cells.push_back({parse_target(c.at("target").get<std::string>()), c.at("scenario").get<std::string>(),
                               c.at("method").get<std::string>(), c.at("values").get<std::vector<double>>(),
                               c.at("mean").get<double>(), c.at("std").get<double>()});
        }
        for (const auto& p : j.at("pool")) {
            r.pool.push_back({parse_target(p.at("target").get<std::string>()), p.at("regressor").get<std::string>(),
                              parse_modality(p.at("modality").get<std::string>()),
                              p.at("validation_ccc").get<std::vector<double>>()});
        }
        r.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
        return r;
    } catch (const json::exception& e) {
        throw DataError(std::string("report JSON: ") + e.what());
    }
}

namespace {

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

std::string title_case(Target t) { return t == Target::Arousal ? "Arousal" : "Valence"; }

std::string render_csv(const EvaluationReport& r) {
    std::ostringstream out;
    out << "target,scenario,method,repetition,ccc\n";
    for (Target t : r.targets) {
        for (const auto& s : r.scenarios) {
            for (const auto& m : r.methods) {
                const auto& c = r.cell(t, s, m);
                for (std::size_t i = 0; i < c.values.size(); ++i) {
                    out << to_string(t) << ',' << s << ',' << m << ',' << i << ',' << format_double(c.values[i])
                        << '\n';
                }
            }
        }
    }
    return out.str();
}

std::string render_markdown(const EvaluationReport& r) {
    std::ostringstream out;
    for (std::size_t ti = 0; ti < r.targets.size(); ++ti) {
        const Target t = r.targets[ti];
        if (ti) out << '\n';
        out << "## " << title_case(t) << " (CCC, mean±std over repetitions)\n\n| Scenario |";
        for (const auto& m : r.methods) out << ' ' << m << " |";
        out << "\n|---|";
        for (std::size_t i = 0; i < r.methods.size(); ++i) out << "---|";
        out << '\n';
        for (const auto& s : r.scenarios) {
            out << "| " << ImputationMode::parse(s).title() << " |";
            for (const auto& m : r.methods) {
                const auto& c = r.cell(t, s, m);
                out << ' ' << fixed3(c.mean) << "±" << fixed3(c.std) << " |";
            }
            out << '\n';
        }
    }
    bool any_pool = false;
    for (Target t : r.targets) {
        std::vector<const RegressorScore*> rows;
        for (const auto& p : r.pool) {
            if (p.target == t) rows.push_back(&p);
        }
        if (rows.empty()) continue;
        if (!any_pool) out << "\n## Regressor pool (validation CCC)\n";
        any_pool = true;
        out << "\n### " << title_case(t) << "\n\n| Regressor | Modality | CCC |\n|---|---|---|\n";
        for (const auto* p : rows) {
            out << "| " << p->regressor << " | " << to_string(p->modality) << " | " << fixed3(mean_of(p->validation_ccc))
                << "±" << fixed3(sample_std(p->validation_ccc)) << " |\n";
        }
    }
    return out.str();
}

}  // namespace

std::string render_report(const EvaluationReport& report, std::string_view format) {
    if (format == "json") return report_to_json(report).dump(2) + "\n";
    if (format == "csv") return render_csv(report);
    if (format == "markdown" || format == "md") return render_markdown(report);
    throw ConfigError("unknown report format '" + std::string(format) + "' (expected json, csv or markdown)");
}

double percent_change(double full, double scenario) {
    return 100.0 * (scenario - full) / std::abs(full);
}

std::vector<SensitivityCell> sensitivity_summary(const EvaluationReport& report) {
    bool has_full = false;
    for (const auto& s : report.scenarios) has_full = has_full || s == "none";
    if (!has_full) throw DataError("sensitivity summary needs the all-modalities ('none') scenario");
    std::vector<SensitivityCell> out;
    for (Target t : report.targets) {
        for (const auto& s : report.scenarios) {
            if (s == "none") continue;
            for (const auto& m : report.methods) {
                const double full = report.cell(t, "none", m).mean;
                SensitivityCell c{t, s, m, std::nullopt};
                if (std::abs(full) >= 1e-6) c.percent = percent_change(full, report.cell(t, s, m).mean);
                out.push_back(c);
            }
        }
    }
    return out;
}

std::string render_sensitivity(const EvaluationReport& report, const std::vector<SensitivityCell>& cells) {
    std::ostringstream out;
    for (std::size_t ti = 0; ti < report.targets.size(); ++ti) {
        const Target t = report.targets[ti];
        if (ti) out << '\n';
        out << "## " << title_case(t) << " (% CCC change vs. all modalities)\n\n| Scenario |";
        for (const auto& m : report.methods) out << ' ' << m << " |";
        out << "\n|---|";
        for (std::size_t i = 0; i < report.methods.size(); ++i) out << "---|";
        out << '\n';
        for (const auto& s : report.scenarios) {
            if (s == "none") continue;
            out << "| " << ImputationMode::parse(s).title() << " |";
            for (const auto& m : report.methods) {
                for (const auto& c : cells) {
                    if (c.target != t || c.scenario != s || c.method != m) continue;
                    if (c.percent) {
                        char buf[32];
                        std::snprintf(buf, sizeof(buf), "%+.2f%%", *c.percent);
                        out << ' ' << buf << " |";
                    } else {
                        out << " undefined |";
                    }
                }
            }
            out << '\n';
        }
    }
    return out.str();
}

}  // namespace mmdes
