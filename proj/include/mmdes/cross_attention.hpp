#pragma once

#include "mmdes/types.hpp"

#include "json.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace mmdes {

/// Joint cross-attention fusion of an audio and a video clip sequence.
///
/// With X_a (d_a x L), X_v (d_v x L) and J = [X_a; X_v] (d x L):
///   C_a   = tanh(X_a' W_ja J / sqrt(d))           L x L
///   C_v   = tanh(X_v' W_jv J / sqrt(d))           L x L
///   H_a   = ReLU(W_a X_a + W_ca C_a')             d_a x L
///   H_v   = ReLU(W_v X_v + W_cv C_v')             d_v x L
///   Att_a = W_ha H_a + X_a,  Att_v = W_hv H_v + X_v
///   y     = w . vec([Att_a; Att_v]) + b           (column-major vec)
namespace xatt {

struct Dims {
    Index audio = 0;  ///< d_a
    Index video = 0;  ///< d_v
    Index clips = 0;  ///< L

    Index joint() const { return audio + video; }
    bool operator==(const Dims&) const = default;
};

inline constexpr std::size_t kBlockCount = 9;

struct Params {
    Dims dims;
    Eigen::MatrixXd audio_joint;        ///< W_ja, d_a x d
    Eigen::MatrixXd video_joint;        ///< W_jv, d_v x d
    Eigen::MatrixXd audio_input;        ///< W_a,  d_a x d_a
    Eigen::MatrixXd audio_correlation;  ///< W_ca, d_a x L
    Eigen::MatrixXd video_input;        ///< W_v,  d_v x d_v
    Eigen::MatrixXd video_correlation;  ///< W_cv, d_v x L
    Eigen::MatrixXd audio_attention;    ///< W_ha, d_a x d_a
    Eigen::MatrixXd video_attention;    ///< W_hv, d_v x d_v
    Eigen::MatrixXd head;               ///< (d*L + 1) x 1, last entry is the bias

    static Params zeros(const Dims& dims);
    /// Entries uniform in [-s, s], s = 1/sqrt(fan_in) of each block.
    static Params random(const Dims& dims, std::uint64_t seed);

    static const std::array<std::string_view, kBlockCount>& block_names();
    std::array<Eigen::MatrixXd*, kBlockCount> blocks();
    std::array<const Eigen::MatrixXd*, kBlockCount> blocks() const;

    double head_bias() const { return head(head.rows() - 1, 0); }
    Index parameter_count() const;
    bool all_finite() const;
    /// Throws DataError when a block shape disagrees with `dims`.
    void check_shapes() const;
    bool operator==(const Params& other) const;
};

/// One training/evaluation example: L clip vectors per modality.
struct Subsequence {
    Eigen::MatrixXd audio;  ///< d_a x L
    Eigen::MatrixXd video;  ///< d_v x L
    double target = 0.0;
};

struct Cache {
    Eigen::MatrixXd joint;
    Eigen::MatrixXd audio_corr;  ///< C_a
    Eigen::MatrixXd video_corr;  ///< C_v
    Eigen::MatrixXd audio_pre;   ///< W_a X_a + W_ca C_a'
    Eigen::MatrixXd video_pre;
    Eigen::MatrixXd audio_hidden;  ///< H_a
    Eigen::MatrixXd video_hidden;
    Eigen::MatrixXd attended;  ///< X_att, d x L
};

struct ForwardResult {
    double prediction = 0.0;
    Cache cache;
};

ForwardResult forward(const Params& params, const Subsequence& input);

/// Exact gradient of (prediction - target)^2 for every block. The ReLU
/// derivative at 0 is 0. Throws DataError if `cache` does not fit `params`.
Params backward(const Params& params, const Subsequence& input, const Cache& cache);

struct TrainConfig {
    double learning_rate = 0.01;
    Index epochs = 200;
    std::uint64_t seed = 0;
};

struct TrainResult {
    Params params;
    /// Mean squared error at the start of every epoch, then after the last update.
    std::vector<double> loss_trace;
};

/// Full-batch gradient descent on the mean squared error. Throws
/// NumericError naming the epoch when the loss becomes non-finite.
TrainResult train(const std::vector<Subsequence>& data, const Dims& dims, const TrainConfig& config);

double mean_squared_error(const Params& params, const std::vector<Subsequence>& data);

/// Concatenated audio and video features of a person, one column per frame.
struct ModalityTracks {
    Eigen::MatrixXd audio;  ///< d_a x T
    Eigen::MatrixXd video;  ///< d_v x T
};

ModalityTracks modality_tracks(const PersonRecord& record);

/// Subsequences ending at frames t = L*clip_len - 1, ..., T - 1 with the given
/// stride. Clip l of the window ending at t averages frames
/// [t - (L - l)*clip_len + 1, t - (L - l - 1)*clip_len]. Target is the label at t.
std::vector<Subsequence> subsequences(const PersonRecord& record, Target target, Index clips, Index clip_len,
                                      Index stride = 1);

struct SequencePrediction {
    Eigen::VectorXd predictions;
    std::vector<Index> end_frames;
};

/// One prediction per subsequence (stride 1), aligned to the window's last
/// frame; T - L*clip_len + 1 values. Throws DataError when T < L*clip_len.
SequencePrediction evaluate_sequence(const Params& params, const PersonRecord& record, Index clip_len);

struct GradCheckReport {
    std::array<double, kBlockCount> block_error{};
    double max_error = 0.0;
};

/// Central finite differences (step `eps`) against backward() on a random
/// instance drawn from `seed`. Element error is |a - n| / max(|a| + |n|, 1e-8).
/// `corrupt` perturbs one analytic gradient entry (negative control).
GradCheckReport gradient_check(const Dims& dims, std::uint64_t seed, double eps = 1e-5, bool corrupt = false);

nlohmann::json params_to_json(const Params& params);
Params params_from_json(const nlohmann::json& j);
void write_loss_trace(const std::filesystem::path& path, const std::vector<double>& trace);

}  // namespace xatt
}  // namespace mmdes
