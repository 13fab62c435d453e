#pragma once

#include "mmdes/selection.hpp"
#include "mmdes/windowing.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mmdes {

enum class MetaMode { Soft, Hard };

std::string_view to_string(MetaMode m);
MetaMode parse_meta_mode(std::string_view text);

struct MetaTrainConfig {
    /// Frames per non-overlapping labelling window.
    Index window_len = 150;
    Index epochs = 500;
    double learning_rate = 0.1;
    std::uint64_t seed = 0;
};

/// Multinomial logistic regression from the pool's (standardized) outputs
/// to "which regressor is best here". Weights are (N+1) x N; the last row
/// is the bias.
struct MetaModel {
    Eigen::MatrixXd weights;
    Eigen::VectorXd input_mean;
    Eigen::VectorXd input_scale;
    MetaTrainConfig config;
    /// Cross-entropy before each epoch, then after the last one.
    std::vector<double> loss_trace;
    /// Window counts per class label.
    std::vector<Index> class_counts;
    /// No usable window: the model returns uniform weights.
    bool uniform_fallback = false;

    Index pool_size() const { return weights.cols(); }
    /// Fewer than two distinct window labels were seen during training.
    bool degenerate() const;
    std::string diagnostic() const;
};

/// Labels each non-overlapping window (inside each segment; trailing partial
/// windows dropped, windows with a constant gold track skipped) with the
/// regressor of highest CCC, ties to the lowest index, then fits the
/// classifier on every frame of the labelled windows by full-batch gradient
/// descent on cross-entropy.
///
/// `segments` marks person boundaries so windows never straddle two
/// persons; an empty list treats all rows as one segment.
MetaModel meta_train(const Eigen::MatrixXd& val_predictions, const Eigen::VectorXd& val_labels,
                     const std::vector<Segment>& segments, const MetaTrainConfig& config);

/// Class probabilities (Soft) or the one-hot argmax (Hard) for one frame.
SelectionWeights meta_weights(const MetaModel& model, std::span<const double> predictions,
                              MetaMode mode = MetaMode::Soft);

}  // namespace mmdes
