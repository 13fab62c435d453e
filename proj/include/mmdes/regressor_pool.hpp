#pragma once

#include "mmdes/ridge.hpp"
#include "mmdes/types.hpp"
#include "mmdes/windowing.hpp"

#include "json.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mmdes {

/// The pool F = {f_1..f_N}: one regressor per feature group, in layout order,
/// all trained for the same target.
struct RegressorPool {
    Target target = Target::Arousal;
    SampleLayout layout;
    std::vector<Regressor> regressors;

    std::size_t size() const { return regressors.size(); }
};

/// Per-regressor prediction tracks (frames x N). Column order follows the pool.
struct PoolPredictions {
    Target target = Target::Arousal;
    std::vector<std::string> names;
    std::vector<Modality> modalities;
    Eigen::MatrixXd values;
    /// Gold labels aligned to the rows, when known.
    Eigen::VectorXd labels;

    Index frames() const { return values.rows(); }
    Index pool_size() const { return values.cols(); }
};

/// Squared errors of every regressor on every validation frame, plus the
/// joint feature keys the neighbour search runs on.
struct ValidationErrorTable {
    Eigen::MatrixXd errors;       ///< frames x N, sqe_{k,i}
    Eigen::MatrixXd keys;         ///< frames x key width
    Eigen::VectorXd labels;       ///< frames
    Eigen::MatrixXd predictions;  ///< frames x N

    Index frames() const { return errors.rows(); }
    Index pool_size() const { return errors.cols(); }
};

/// Trains one ridge regressor per group of `train` (standardized samples).
/// Groups are independent; each sees only its own slice.
RegressorPool train_pool(const FrameSamples& train, Target target, double lambda);

/// Column i is regressor i applied to its own group's slice of each sample.
PoolPredictions predict(const RegressorPool& pool, const FrameSamples& samples);

ValidationErrorTable build_validation_table(const RegressorPool& pool, const FrameSamples& val,
                                            Index key_context);
/// Variant for externally supplied predictions; `predictions.labels` must be set.
ValidationErrorTable build_validation_table(const PoolPredictions& predictions, Eigen::MatrixXd keys);

/// Sidecar mapping file for a predictions CSV: same path, ".json" extension.
std::filesystem::path sidecar_path(const std::filesystem::path& csv_path);

/// Writes `<csv>` (one column per regressor, then "label") and its sidecar
/// {"target": ..., "columns": [{"name", "modality"}...], "label_column": "label"}.
void write_predictions(const std::filesystem::path& csv_path, const PoolPredictions& predictions);

/// Inverse of write_predictions. With `expected_rows` set, a different row
/// count is a DataError.
PoolPredictions load_predictions(const std::filesystem::path& csv_path,
                                 std::optional<Index> expected_rows = std::nullopt);

nlohmann::json pool_to_json(const RegressorPool& pool);
RegressorPool pool_from_json(const nlohmann::json& j);

}  // namespace mmdes
