#pragma once

#include "mmdes/experiment_config.hpp"
#include "mmdes/report.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace mmdes {

/// Column names of the combination methods, in report order.
inline const std::vector<std::string>& method_names(bool with_cross_attention) {
    static const std::vector<std::string> base = {"Mean", "DS", "DW", "DWS", "Meta-DW"};
    static const std::vector<std::string> full = {"Mean", "DS", "DW", "DWS", "Meta-DW", "Cross-Attention"};
    return with_cross_attention ? full : base;
}

struct RunOptions {
    /// Worker threads for independent repetitions (1 = run inline).
    unsigned jobs = 1;
    /// When set, per-frame weight vectors of DS, DW, DWS and Meta-DW are
    /// written here as CSV.
    std::optional<std::filesystem::path> dump_weights;
    /// Called after each finished repetition with (done, total).
    std::function<void(std::size_t, std::size_t)> progress;
};

/// Runs the full protocol: for every repetition split persons, standardize
/// on train, train the pools (one per target), build validation error
/// tables and the neighbour index, train Meta-DW (and cross-attention when
/// enabled), then for every scenario impute the test persons only and score
/// each method with one CCC over the concatenated test frames.
///
/// Errors carry "repetition r, scenario s" context. Deterministic in
/// (config, config.seed) regardless of `jobs`.
EvaluationReport run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

}  // namespace mmdes
