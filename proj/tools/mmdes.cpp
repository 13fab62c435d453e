// mmdes: generate data, run the selection experiment, ablate a modality,
// re-render reports and check the cross-attention gradients.

#include "mmdes/cross_attention.hpp"
#include "mmdes/dataset_io.hpp"
#include "mmdes/error.hpp"
#include "mmdes/experiment_config.hpp"
#include "mmdes/harness.hpp"
#include "mmdes/report.hpp"
#include "mmdes/synthetic.hpp"

#include "CLI11.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace mmdes;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitRuntime = 2;

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << text;
    if (!out) throw DataError("write failed: " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// MMDES_SEED replaces the config seed when set.
void apply_seed_override(ExperimentConfig& cfg) {
    const char* env = std::getenv("MMDES_SEED");
    if (!env || !*env) return;
    std::uint64_t seed = 0;
    const char* end = env + std::char_traits<char>::length(env);
    auto [ptr, ec] = std::from_chars(env, end, seed);
    if (ec != std::errc() || ptr != end) throw ConfigError(std::string("MMDES_SEED is not an integer: ") + env);
    cfg.seed = seed;
}

struct RunArgs {
    std::string config;
    std::string out = ".";
    std::vector<std::string> formats;
    unsigned jobs = 1;
    std::string dump_weights;
    bool impute_validation = false;
    bool quiet = false;
};

ExperimentConfig load_config(const RunArgs& a) {
    ExperimentConfig cfg = load_experiment_config(a.config);
    apply_seed_override(cfg);
    if (a.impute_validation) cfg.impute_validation = true;
    cfg.validate();
    return cfg;
}

EvaluationReport execute(const ExperimentConfig& cfg, const RunArgs& a) {
    RunOptions opts;
    opts.jobs = a.jobs;
    if (!a.dump_weights.empty()) opts.dump_weights = fs::path(a.dump_weights);
    if (!a.quiet) {
        opts.progress = [](std::size_t done, std::size_t total) {
            std::fprintf(stderr, "repetition %zu/%zu done\n", done, total);
        };
    }
    return run_experiment(cfg, opts);
}

void write_artifacts(const EvaluationReport& report, const RunArgs& a) {
    fs::create_directories(a.out);
    std::vector<std::string> formats = a.formats;
    if (formats.empty()) formats = {"json", "csv", "markdown"};
    for (const auto& f : formats) {
        const std::string ext = f == "markdown" ? "md" : f;
        write_text(fs::path(a.out) / ("report." + ext), render_report(report, f));
    }
}

void add_run_flags(CLI::App* cmd, RunArgs& a) {
    cmd->add_option("--config", a.config, "experiment config (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", a.out, "output directory")->capture_default_str();
    cmd->add_option("--format", a.formats, "report formats to write (json, csv, markdown); default all")
        ->check(CLI::IsMember({"json", "csv", "markdown"}));
    cmd->add_option("--jobs", a.jobs, "worker threads for repetitions")->check(CLI::PositiveNumber);
    cmd->add_option("--dump-weights", a.dump_weights, "write per-frame selection weights to this CSV");
    cmd->add_flag("--impute-validation", a.impute_validation, "impute validation persons as well");
    cmd->add_flag("-q,--quiet", a.quiet, "no progress output");
}

std::vector<Index> parse_dims(const std::string& text) {
    std::vector<Index> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        Index v = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
        if (ec != std::errc() || ptr != part.data() + part.size() || v < 1) {
            throw ConfigError("--dims expects three positive integers d_a,d_v,L; got '" + text + "'");
        }
        out.push_back(v);
    }
    if (out.size() != 3) throw ConfigError("--dims expects three positive integers d_a,d_v,L; got '" + text + "'");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dynamic ensemble selection for multimodal arousal/valence regression"};
    app.require_subcommand(1);

    // gen
    SyntheticConfig gen_cfg;
    std::uint64_t gen_seed = 42;
    std::string gen_out;
    auto* gen = app.add_subcommand("gen", "write a synthetic dataset (manifest + CSVs)");
    gen->add_option("--persons", gen_cfg.persons, "number of persons")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--frames", gen_cfg.frames, "frames per person")->capture_default_str()->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "seed")->capture_default_str();
    gen->add_option("--out", gen_out, "output directory")->required();
    gen->add_option("--noise", gen_cfg.noise, "feature noise standard deviation")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    gen->add_option("--cross-informativeness", gen_cfg.cross_informativeness, "weight of the other latent signal")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 1.0));

    // run
    RunArgs run_args;
    auto* run = app.add_subcommand("run", "run the experiment described by a config file");
    add_run_flags(run, run_args);

    // ablate
    RunArgs ablate_args;
    std::string disable;
    std::string impute;
    auto* ablate = app.add_subcommand("ablate", "compare all modalities against one disabled modality");
    add_run_flags(ablate, ablate_args);
    ablate->add_option("--disable-modality", disable, "modality to disable")
        ->required()
        ->check(CLI::IsMember({"audio", "video"}));
    ablate->add_option("--impute", impute, "replacement for the disabled features (default: both)")
        ->check(CLI::IsMember({"zero", "mean"}));

    // report
    std::string report_in;
    std::string report_format = "markdown";
    auto* report = app.add_subcommand("report", "re-render a saved report.json");
    report->add_option("--in", report_in, "report.json")->required()->check(CLI::ExistingFile);
    report->add_option("--format", report_format, "json, csv, markdown or sensitivity")
        ->capture_default_str()
        ->check(CLI::IsMember({"json", "csv", "markdown", "md", "sensitivity"}));

    // grad-check
    std::uint64_t gc_seed = 7;
    std::string gc_dims = "4,3,5";
    double gc_eps = 1e-5;
    bool gc_corrupt = false;
    auto* grad = app.add_subcommand("grad-check", "finite-difference check of the cross-attention gradients");
    grad->add_option("--seed", gc_seed, "seed")->capture_default_str();
    grad->add_option("--dims", gc_dims, "d_a,d_v,L")->capture_default_str();
    grad->add_option("--eps", gc_eps, "central difference step")->capture_default_str()->check(CLI::PositiveNumber);
    grad->add_flag("--corrupt", gc_corrupt, "perturb one analytic gradient entry (negative control)")
        ->group("");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*gen) {
            const MultimodalDataset ds = generate_synthetic(gen_cfg, gen_seed);
            const fs::path manifest = write_dataset(ds, gen_out);
            std::cout << manifest.string() << '\n';
        } else if (*run) {
            const ExperimentConfig cfg = load_config(run_args);
            const EvaluationReport rep = execute(cfg, run_args);
            write_artifacts(rep, run_args);
            std::cout << render_report(rep, "markdown");
        } else if (*ablate) {
            ExperimentConfig cfg = load_config(ablate_args);
            const Modality m = parse_modality(disable);
            cfg.scenarios = {ImputationMode::none()};
            if (impute.empty() || impute == "zero") cfg.scenarios.push_back(ImputationMode::zero(m));
            if (impute.empty() || impute == "mean") cfg.scenarios.push_back(ImputationMode::mean(m));
            const EvaluationReport rep = execute(cfg, ablate_args);
            write_artifacts(rep, ablate_args);
            std::cout << render_report(rep, "markdown") << '\n' << render_sensitivity(rep, sensitivity_summary(rep));
        } else if (*report) {
            const EvaluationReport rep = report_from_json(nlohmann::json::parse(read_text(report_in)));
            if (report_format == "sensitivity") {
                std::cout << render_sensitivity(rep, sensitivity_summary(rep));
            } else {
                std::cout << render_report(rep, report_format);
            }
        } else if (*grad) {
            const auto d = parse_dims(gc_dims);
            const xatt::GradCheckReport r = xatt::gradient_check({d[0], d[1], d[2]}, gc_seed, gc_eps, gc_corrupt);
            const auto& names = xatt::Params::block_names();
            for (std::size_t i = 0; i < names.size(); ++i) {
                std::printf("%-18s %.3e\n", std::string(names[i]).c_str(), r.block_error[i]);
            }
            const bool ok = r.max_error < 1e-4;
            std::printf("max relative error %.3e (%s)\n", r.max_error, ok ? "ok" : "FAILED");
            return ok ? kExitOk : kExitRuntime;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}
