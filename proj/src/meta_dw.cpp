#include "mmdes/meta_dw.hpp"

#include "mmdes/error.hpp"
#include "mmdes/metrics.hpp"
#include "mmdes/rng.hpp"

#include <cmath>
#include <limits>

namespace mmdes {

std::string_view to_string(MetaMode m) { return m == MetaMode::Soft ? "soft" : "hard"; }

MetaMode parse_meta_mode(std::string_view text) {
    if (text == "soft") return MetaMode::Soft;
    if (text == "hard") return MetaMode::Hard;
    throw ConfigError("unknown meta mode '" + std::string(text) + "' (expected soft or hard)");
}

bool MetaModel::degenerate() const {
    Index distinct = 0;
    for (Index c : class_counts) distinct += c > 0 ? 1 : 0;
    return distinct < 2;
}

std::string MetaModel::diagnostic() const {
    if (uniform_fallback) return "meta-classifier: no usable validation window, using uniform weights";
    if (degenerate()) return "meta-classifier: fewer than 2 distinct window labels in training data";
    return {};
}

namespace {

// Row-wise softmax in place.
void softmax_rows(Eigen::MatrixXd& logits) {
    for (Index r = 0; r < logits.rows(); ++r) {
        const double peak = logits.row(r).maxCoeff();
        logits.row(r) = (logits.row(r).array() - peak).exp();
        logits.row(r) /= logits.row(r).sum();
    }
}

double cross_entropy(const Eigen::MatrixXd& probs, const std::vector<Index>& labels) {
    double loss = 0.0;
    for (std::size_t r = 0; r < labels.size(); ++r) {
        loss -= std::log(std::max(probs(static_cast<Index>(r), labels[r]), 1e-300));
    }
    return loss / static_cast<double>(labels.size());
}

}  // namespace

MetaModel meta_train(const Eigen::MatrixXd& val_predictions, const Eigen::VectorXd& val_labels,
                     const std::vector<Segment>& segments, const MetaTrainConfig& config) {
    const Index N = val_predictions.cols();
    const Index rows = val_predictions.rows();
    if (N < 1) throw DataError("meta_train: empty pool");
    if (val_labels.size() != rows) throw DataError("meta_train: label/prediction row mismatch");
    if (config.window_len < 2) throw ConfigError("meta window_len must be >= 2");
    if (rows < config.window_len) {
        throw DataError("meta_train: " + std::to_string(rows) + " validation frames, fewer than window_len " +
                        std::to_string(config.window_len));
    }
    if (config.epochs < 0 || !(config.learning_rate > 0.0)) {
        throw ConfigError("meta_train: epochs must be >= 0 and learning_rate > 0");
    }

    MetaModel model;
    model.config = config;
    model.class_counts.assign(static_cast<std::size_t>(N), 0);

    std::vector<Segment> segs = segments;
    if (segs.empty()) segs.push_back({"", 0, rows});

    // Window labels, broadcast to frames.
    std::vector<Index> frame_rows;
    std::vector<Index> frame_labels;
    const Index len = config.window_len;
    for (const auto& seg : segs) {
        for (Index start = seg.begin; start + len <= seg.begin + seg.length; start += len) {
            const Eigen::VectorXd gold = val_labels.segment(start, len);
            if ((gold.array() == gold(0)).all()) continue;
            Index best = 0;
            double best_ccc = -std::numeric_limits<double>::infinity();
            for (Index i = 0; i < N; ++i) {
                const Eigen::VectorXd pred = val_predictions.col(i).segment(start, len);
                const double c = ccc({gold.data(), static_cast<std::size_t>(len)},
                                     {pred.data(), static_cast<std::size_t>(len)});
                if (c > best_ccc) {
                    best_ccc = c;
                    best = i;
                }
            }
            ++model.class_counts[static_cast<std::size_t>(best)];
            for (Index t = start; t < start + len; ++t) {
                frame_rows.push_back(t);
                frame_labels.push_back(best);
            }
        }
    }

    model.input_mean = val_predictions.colwise().mean().transpose();
    model.input_scale =
        ((val_predictions.rowwise() - model.input_mean.transpose()).cwiseAbs2().colwise().mean().transpose())
            .cwiseSqrt();
    for (Index i = 0; i < N; ++i) {
        if (!(model.input_scale(i) > 1e-12)) model.input_scale(i) = 1.0;
    }

    if (frame_rows.empty()) {
        model.uniform_fallback = true;
        model.weights = Eigen::MatrixXd::Zero(N + 1, N);
        return model;
    }

    const auto M = static_cast<Index>(frame_rows.size());
    Eigen::MatrixXd X(M, N + 1);
    for (Index r = 0; r < M; ++r) {
        const Index src = frame_rows[static_cast<std::size_t>(r)];
        X.row(r).head(N) =
            (val_predictions.row(src).transpose() - model.input_mean).cwiseQuotient(model.input_scale).transpose();
        X(r, N) = 1.0;
    }
    Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(M, N);
    for (Index r = 0; r < M; ++r) onehot(r, frame_labels[static_cast<std::size_t>(r)]) = 1.0;

    Rng rng(derive_seed(config.seed, "meta-init"));
    model.weights.resize(N + 1, N);
    for (Index c = 0; c < N; ++c) {
        for (Index r = 0; r < N + 1; ++r) model.weights(r, c) = rng.uniform(-0.01, 0.01);
    }

    for (Index epoch = 0; epoch <= config.epochs; ++epoch) {
        Eigen::MatrixXd probs = X * model.weights;
        softmax_rows(probs);
        const double loss = cross_entropy(probs, frame_labels);
        if (!std::isfinite(loss)) {
            throw NumericError("meta_train: non-finite loss at epoch " + std::to_string(epoch));
        }
        model.loss_trace.push_back(loss);
        if (epoch == config.epochs) break;
        const Eigen::MatrixXd grad = X.transpose() * (probs - onehot) / static_cast<double>(M);
        model.weights -= config.learning_rate * grad;
    }
    return model;
}

SelectionWeights meta_weights(const MetaModel& model, std::span<const double> predictions, MetaMode mode) {
    const Index N = model.pool_size();
    if (static_cast<Index>(predictions.size()) != N) {
        throw DataError("meta_weights: " + std::to_string(predictions.size()) + " predictions for a pool of " +
                        std::to_string(N));
    }
    if (model.uniform_fallback) return SelectionWeights::uniform(N);
    Eigen::RowVectorXd x(N + 1);
    for (Index i = 0; i < N; ++i) {
        x(i) = (predictions[static_cast<std::size_t>(i)] - model.input_mean(i)) / model.input_scale(i);
    }
    x(N) = 1.0;
    Eigen::MatrixXd logits = x * model.weights;
    softmax_rows(logits);
    if (mode == MetaMode::Hard) {
        Index best = 0;
        for (Index i = 1; i < N; ++i) {
            if (logits(0, i) > logits(0, best)) best = i;
        }
        return SelectionWeights::one_hot(N, best);
    }
    return {logits.row(0).transpose(), std::vector<bool>(static_cast<std::size_t>(N), true)};
}

}  // namespace mmdes
