#pragma once

#include "mmdes/cross_attention.hpp"
#include "mmdes/imputation.hpp"
#include "mmdes/meta_dw.hpp"
#include "mmdes/neighbor_index.hpp"
#include "mmdes/selection.hpp"
#include "mmdes/synthetic.hpp"

#include "json.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace mmdes {

enum class SourceKind { Synthetic, Manifest, Predictions };

/// Where the experiment's data comes from.
///
/// - Synthetic: generated from `synthetic` with the master seed.
/// - Manifest: features loaded from `manifest`; the pool is trained here.
/// - Predictions: features from `manifest` (neighbour keys, cross-attention)
///   plus externally computed pool predictions, one CSV per target and
///   scenario label, rows aligned with the manifest's persons in order.
///   The "none" scenario is required for every target.
struct DataSource {
    SourceKind kind = SourceKind::Synthetic;
    SyntheticConfig synthetic;
    std::filesystem::path manifest;
    std::map<Target, std::map<std::string, std::filesystem::path>> predictions;
};

struct CrossAttentionSettings {
    bool enabled = true;
    Index clips = 8;
    Index clip_len = 4;
    /// Frames between consecutive training subsequences.
    Index train_stride = 16;
    double learning_rate = 0.005;
    Index epochs = 60;
};

struct ExperimentConfig {
    DataSource source;
    std::size_t repetitions = 10;
    std::size_t test_persons = 3;
    std::size_t val_persons = 3;
    Index k = kDefaultK;
    Index context_len = 8;
    /// Newest frames per group entering the neighbour key (1 = current frame).
    Index knn_context_len = 1;
    DistanceMetric metric = DistanceMetric::Euclidean;
    double ridge_lambda = 1.0;
    DwsThreshold dws_threshold = DwsThreshold::pool_mean();
    MetaTrainConfig meta;
    MetaMode meta_mode = MetaMode::Soft;
    CrossAttentionSettings cross_attention;
    std::vector<ImputationMode> scenarios = default_scenarios();
    std::vector<Target> targets = {Target::Arousal, Target::Valence};
    std::uint64_t seed = 42;
    /// Also impute the validation persons when building competence data.
    bool impute_validation = false;

    static std::vector<ImputationMode> default_scenarios();
    /// Throws ConfigError on an inconsistent configuration.
    void validate() const;
};

/// Parses a config object. Unknown keys anywhere are rejected with a
/// ConfigError naming the key; relative paths resolve against `base_dir`.
ExperimentConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
nlohmann::json config_to_json(const ExperimentConfig& config);

ExperimentConfig load_experiment_config(const std::filesystem::path& path);

}  // namespace mmdes
