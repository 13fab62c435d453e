#include "mmdes/cross_attention.hpp"

#include "mmdes/dataset_io.hpp"
#include "mmdes/error.hpp"
#include "mmdes/rng.hpp"

#include <cmath>
#include <fstream>

namespace mmdes::xatt {

namespace {

Eigen::MatrixXd uniform_block(Index rows, Index cols, Index fan_in, Rng& rng) {
    const double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Eigen::MatrixXd m(rows, cols);
    for (Index c = 0; c < cols; ++c) {
        for (Index r = 0; r < rows; ++r) m(r, c) = rng.uniform(-s, s);
    }
    return m;
}

void check_dims(const Dims& dims) {
    if (dims.audio < 1 || dims.video < 1 || dims.clips < 1) {
        throw ConfigError("cross-attention dims must be positive (audio, video, clips)");
    }
}

}  // namespace

Params Params::zeros(const Dims& dims) {
    check_dims(dims);
    const Index da = dims.audio, dv = dims.video, d = dims.joint(), L = dims.clips;
    Params p;
    p.dims = dims;
    p.audio_joint = Eigen::MatrixXd::Zero(da, d);
    p.video_joint = Eigen::MatrixXd::Zero(dv, d);
    p.audio_input = Eigen::MatrixXd::Zero(da, da);
    p.audio_correlation = Eigen::MatrixXd::Zero(da, L);
    p.video_input = Eigen::MatrixXd::Zero(dv, dv);
    p.video_correlation = Eigen::MatrixXd::Zero(dv, L);
    p.audio_attention = Eigen::MatrixXd::Zero(da, da);
    p.video_attention = Eigen::MatrixXd::Zero(dv, dv);
    p.head = Eigen::MatrixXd::Zero(d * L + 1, 1);
    return p;
}

Params Params::random(const Dims& dims, std::uint64_t seed) {
    check_dims(dims);
    const Index da = dims.audio, dv = dims.video, d = dims.joint(), L = dims.clips;
    Rng rng(derive_seed(seed, "xatt-init"));
    Params p;
    p.dims = dims;
    p.audio_joint = uniform_block(da, d, d, rng);
    p.video_joint = uniform_block(dv, d, d, rng);
    p.audio_input = uniform_block(da, da, da, rng);
    p.audio_correlation = uniform_block(da, L, L, rng);
    p.video_input = uniform_block(dv, dv, dv, rng);
    p.video_correlation = uniform_block(dv, L, L, rng);
    p.audio_attention = uniform_block(da, da, da, rng);
    p.video_attention = uniform_block(dv, dv, dv, rng);
    p.head = uniform_block(d * L + 1, 1, d * L, rng);
    return p;
}

const std::array<std::string_view, kBlockCount>& Params::block_names() {
    static const std::array<std::string_view, kBlockCount> names = {
        "audio_joint",     "video_joint",       "audio_input",     "audio_correlation", "video_input",
        "video_correlation", "audio_attention", "video_attention", "dense_head"};
    return names;
}

std::array<Eigen::MatrixXd*, kBlockCount> Params::blocks() {
    return {&audio_joint, &video_joint, &audio_input, &audio_correlation, &video_input,
            &video_correlation, &audio_attention, &video_attention, &head};
}

std::array<const Eigen::MatrixXd*, kBlockCount> Params::blocks() const {
    return {&audio_joint, &video_joint, &audio_input, &audio_correlation, &video_input,
            &video_correlation, &audio_attention, &video_attention, &head};
}

Index Params::parameter_count() const {
    Index n = 0;
    for (const auto* b : blocks()) n += b->size();
    return n;
}

bool Params::all_finite() const {
    for (const auto* b : blocks()) {
        if (!b->allFinite()) return false;
    }
    return true;
}

void Params::check_shapes() const {
    const Params ref = zeros(dims);
    const auto mine = blocks();
    const auto want = ref.blocks();
    for (std::size_t i = 0; i < kBlockCount; ++i) {
        if (mine[i]->rows() != want[i]->rows() || mine[i]->cols() != want[i]->cols()) {
            throw DataError("cross-attention block '" + std::string(block_names()[i]) + "' is " +
                            std::to_string(mine[i]->rows()) + "x" + std::to_string(mine[i]->cols()) +
                            ", expected " + std::to_string(want[i]->rows()) + "x" +
                            std::to_string(want[i]->cols()));
        }
    }
}

bool Params::operator==(const Params& other) const {
    if (!(dims == other.dims)) return false;
    const auto a = blocks();
    const auto b = other.blocks();
    for (std::size_t i = 0; i < kBlockCount; ++i) {
        if (a[i]->rows() != b[i]->rows() || a[i]->cols() != b[i]->cols() || *a[i] != *b[i]) return false;
    }
    return true;
}

ForwardResult forward(const Params& p, const Subsequence& in) {
    const Dims& dims = p.dims;
    if (in.audio.rows() != dims.audio || in.video.rows() != dims.video || in.audio.cols() != dims.clips ||
        in.video.cols() != dims.clips) {
        throw DataError("cross-attention input is audio " + std::to_string(in.audio.rows()) + "x" +
                        std::to_string(in.audio.cols()) + ", video " + std::to_string(in.video.rows()) + "x" +
                        std::to_string(in.video.cols()) + "; model expects (" + std::to_string(dims.audio) + ", " +
                        std::to_string(dims.video) + ") x " + std::to_string(dims.clips));
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(dims.joint()));

    ForwardResult out;
    Cache& c = out.cache;
    c.joint.resize(dims.joint(), dims.clips);
    c.joint << in.audio, in.video;

    c.audio_corr = (in.audio.transpose() * p.audio_joint * c.joint * scale).array().tanh();
    c.video_corr = (in.video.transpose() * p.video_joint * c.joint * scale).array().tanh();

    c.audio_pre = p.audio_input * in.audio + p.audio_correlation * c.audio_corr.transpose();
    c.video_pre = p.video_input * in.video + p.video_correlation * c.video_corr.transpose();
    c.audio_hidden = c.audio_pre.cwiseMax(0.0);
    c.video_hidden = c.video_pre.cwiseMax(0.0);

    c.attended.resize(dims.joint(), dims.clips);
    c.attended << p.audio_attention * c.audio_hidden + in.audio, p.video_attention * c.video_hidden + in.video;

    const Index flat = dims.joint() * dims.clips;
    const Eigen::Map<const Eigen::VectorXd> vec(c.attended.data(), flat);
    out.prediction = p.head.col(0).head(flat).dot(vec) + p.head_bias();
    return out;
}

Params backward(const Params& p, const Subsequence& in, const Cache& c) {
    const Dims& dims = p.dims;
    const Index da = dims.audio, dv = dims.video, d = dims.joint(), L = dims.clips;
    if (c.attended.rows() != d || c.attended.cols() != L || c.audio_corr.rows() != L ||
        c.audio_corr.cols() != L || c.audio_hidden.rows() != da || c.video_hidden.rows() != dv ||
        c.joint.rows() != d) {
        throw DataError("cross-attention backward: cache shape does not match the parameters");
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));
    const Index flat = d * L;
    const Eigen::Map<const Eigen::VectorXd> vec(c.attended.data(), flat);
    const double prediction = p.head.col(0).head(flat).dot(vec) + p.head_bias();
    const double upstream = 2.0 * (prediction - in.target);

    Params g = Params::zeros(dims);
    g.head.col(0).head(flat) = upstream * vec;
    g.head(flat, 0) = upstream;

    const Eigen::Map<const Eigen::MatrixXd> head_w(p.head.data(), d, L);
    const Eigen::MatrixXd d_att = upstream * head_w;
    const Eigen::MatrixXd d_att_a = d_att.topRows(da);
    const Eigen::MatrixXd d_att_v = d_att.bottomRows(dv);

    g.audio_attention = d_att_a * c.audio_hidden.transpose();
    g.video_attention = d_att_v * c.video_hidden.transpose();

    const Eigen::MatrixXd d_pre_a =
        (p.audio_attention.transpose() * d_att_a).cwiseProduct((c.audio_pre.array() > 0.0).cast<double>().matrix());
    const Eigen::MatrixXd d_pre_v =
        (p.video_attention.transpose() * d_att_v).cwiseProduct((c.video_pre.array() > 0.0).cast<double>().matrix());

    g.audio_input = d_pre_a * in.audio.transpose();
    g.video_input = d_pre_v * in.video.transpose();
    g.audio_correlation = d_pre_a * c.audio_corr;
    g.video_correlation = d_pre_v * c.video_corr;

    // d/dC = (W_c' dPre)', then through tanh.
    const Eigen::MatrixXd d_corr_a = d_pre_a.transpose() * p.audio_correlation;
    const Eigen::MatrixXd d_corr_v = d_pre_v.transpose() * p.video_correlation;
    const Eigen::MatrixXd d_raw_a = d_corr_a.cwiseProduct((1.0 - c.audio_corr.array().square()).matrix());
    const Eigen::MatrixXd d_raw_v = d_corr_v.cwiseProduct((1.0 - c.video_corr.array().square()).matrix());

    g.audio_joint = scale * in.audio * d_raw_a * c.joint.transpose();
    g.video_joint = scale * in.video * d_raw_v * c.joint.transpose();
    return g;
}

double mean_squared_error(const Params& params, const std::vector<Subsequence>& data) {
    if (data.empty()) throw DataError("cross-attention: empty dataset");
    double loss = 0.0;
    for (const auto& s : data) {
        const double e = forward(params, s).prediction - s.target;
        loss += e * e;
    }
    return loss / static_cast<double>(data.size());
}

TrainResult train(const std::vector<Subsequence>& data, const Dims& dims, const TrainConfig& config) {
    if (data.empty()) throw DataError("cross-attention training needs at least one subsequence");
    if (config.epochs < 0 || !(config.learning_rate > 0.0)) {
        throw ConfigError("cross-attention: epochs must be >= 0 and learning_rate > 0");
    }
    TrainResult result{Params::random(dims, config.seed), {}};
    Params& p = result.params;
    const double inv_n = 1.0 / static_cast<double>(data.size());

    for (Index epoch = 0; epoch <= config.epochs; ++epoch) {
        Params grad = Params::zeros(dims);
        auto grad_blocks = grad.blocks();
        double loss = 0.0;
        for (const auto& s : data) {
            const ForwardResult f = forward(p, s);
            const double e = f.prediction - s.target;
            loss += e * e;
            if (epoch == config.epochs) continue;
            const Params g = backward(p, s, f.cache);
            const auto gb = g.blocks();
            for (std::size_t b = 0; b < kBlockCount; ++b) *grad_blocks[b] += *gb[b];
        }
        loss *= inv_n;
        if (!std::isfinite(loss)) {
            throw NumericError("cross-attention training: non-finite loss at epoch " + std::to_string(epoch));
        }
        result.loss_trace.push_back(loss);
        if (epoch == config.epochs) break;
        auto blocks = p.blocks();
        for (std::size_t b = 0; b < kBlockCount; ++b) *blocks[b] -= (config.learning_rate * inv_n) * *grad_blocks[b];
    }
    return result;
}

ModalityTracks modality_tracks(const PersonRecord& record) {
    Index da = 0, dv = 0;
    for (const auto& g : record.groups) (g.modality == Modality::Audio ? da : dv) += g.dim();
    if (da == 0 || dv == 0) throw DataError("cross-attention needs at least one audio and one video group");
    ModalityTracks tracks{Eigen::MatrixXd(da, record.frames()), Eigen::MatrixXd(dv, record.frames())};
    Index ra = 0, rv = 0;
    for (const auto& g : record.groups) {
        if (g.modality == Modality::Audio) {
            tracks.audio.middleRows(ra, g.dim()) = g.values.transpose();
            ra += g.dim();
        } else {
            tracks.video.middleRows(rv, g.dim()) = g.values.transpose();
            rv += g.dim();
        }
    }
    return tracks;
}

namespace {

// Clip means via column prefix sums: prefix.col(t) = sum of frames [0, t).
Eigen::MatrixXd prefix_sums(const Eigen::MatrixXd& track) {
    Eigen::MatrixXd prefix = Eigen::MatrixXd::Zero(track.rows(), track.cols() + 1);
    for (Index t = 0; t < track.cols(); ++t) prefix.col(t + 1) = prefix.col(t) + track.col(t);
    return prefix;
}

Eigen::MatrixXd clip_matrix(const Eigen::MatrixXd& track, const Eigen::MatrixXd& prefix, Index end, Index clips,
                            Index clip_len) {
    Eigen::MatrixXd out(track.rows(), clips);
    const Index first = end - clips * clip_len + 1;
    for (Index l = 0; l < clips; ++l) {
        const Index a = first + l * clip_len;
        if (clip_len == 1) {
            out.col(l) = track.col(a);
        } else {
            out.col(l) = (prefix.col(a + clip_len) - prefix.col(a)) / static_cast<double>(clip_len);
        }
    }
    return out;
}

void check_windowing(const PersonRecord& record, Index clips, Index clip_len) {
    if (clips < 1 || clip_len < 1) throw ConfigError("clips and clip_len must be >= 1");
    if (record.frames() < clips * clip_len) {
        throw DataError("person '" + record.id + "' has " + std::to_string(record.frames()) +
                        " frames, fewer than clips*clip_len = " + std::to_string(clips * clip_len));
    }
}

}  // namespace

std::vector<Subsequence> subsequences(const PersonRecord& record, Target target, Index clips, Index clip_len,
                                      Index stride) {
    check_windowing(record, clips, clip_len);
    if (stride < 1) throw ConfigError("subsequence stride must be >= 1");
    const ModalityTracks tracks = modality_tracks(record);
    const Eigen::MatrixXd pa = prefix_sums(tracks.audio);
    const Eigen::MatrixXd pv = prefix_sums(tracks.video);
    std::vector<Subsequence> out;
    for (Index end = clips * clip_len - 1; end < record.frames(); end += stride) {
        out.push_back({clip_matrix(tracks.audio, pa, end, clips, clip_len),
                       clip_matrix(tracks.video, pv, end, clips, clip_len),
                       record.labels(end, static_cast<Index>(target))});
    }
    return out;
}

SequencePrediction evaluate_sequence(const Params& params, const PersonRecord& record, Index clip_len) {
    const Index clips = params.dims.clips;
    check_windowing(record, clips, clip_len);
    const ModalityTracks tracks = modality_tracks(record);
    const Eigen::MatrixXd pa = prefix_sums(tracks.audio);
    const Eigen::MatrixXd pv = prefix_sums(tracks.video);
    SequencePrediction out;
    const Index count = record.frames() - clips * clip_len + 1;
    out.predictions.resize(count);
    for (Index i = 0; i < count; ++i) {
        const Index end = clips * clip_len - 1 + i;
        const Subsequence s{clip_matrix(tracks.audio, pa, end, clips, clip_len),
                            clip_matrix(tracks.video, pv, end, clips, clip_len), 0.0};
        out.predictions(i) = forward(params, s).prediction;
        out.end_frames.push_back(end);
    }
    return out;
}

GradCheckReport gradient_check(const Dims& dims, std::uint64_t seed, double eps, bool corrupt) {
    Params p = Params::random(dims, seed);
    Rng rng(derive_seed(seed, "xatt-gradcheck"));
    Subsequence s{Eigen::MatrixXd(dims.audio, dims.clips), Eigen::MatrixXd(dims.video, dims.clips), 0.0};
    for (Index i = 0; i < s.audio.size(); ++i) s.audio.data()[i] = rng.normal();
    for (Index i = 0; i < s.video.size(); ++i) s.video.data()[i] = rng.normal();
    s.target = rng.normal();

    const ForwardResult f = forward(p, s);
    Params analytic = backward(p, s, f.cache);
    if (corrupt) analytic.audio_joint(0, 0) += 1.0;

    auto loss = [&](const Params& q) {
        const double e = forward(q, s).prediction - s.target;
        return e * e;
    };

    GradCheckReport report;
    auto blocks = p.blocks();
    const auto grads = analytic.blocks();
    for (std::size_t b = 0; b < kBlockCount; ++b) {
        double worst = 0.0;
        for (Index i = 0; i < blocks[b]->size(); ++i) {
            double& w = blocks[b]->data()[i];
            const double saved = w;
            w = saved + eps;
            const double up = loss(p);
            w = saved - eps;
            const double down = loss(p);
            w = saved;
            const double numeric = (up - down) / (2.0 * eps);
            const double a = grads[b]->data()[i];
            worst = std::max(worst, std::abs(a - numeric) / std::max(std::abs(a) + std::abs(numeric), 1e-8));
        }
        report.block_error[b] = worst;
        report.max_error = std::max(report.max_error, worst);
    }
    return report;
}

nlohmann::json params_to_json(const Params& params) {
    nlohmann::json j;
    j["format"] = "mmdes-cross-attention/1";
    j["dims"] = {{"audio", params.dims.audio}, {"video", params.dims.video}, {"clips", params.dims.clips}};
    j["blocks"] = nlohmann::json::array();
    const auto blocks = params.blocks();
    for (std::size_t b = 0; b < kBlockCount; ++b) {
        const auto* m = blocks[b];
        j["blocks"].push_back({{"name", Params::block_names()[b]},
                               {"rows", m->rows()},
                               {"cols", m->cols()},
                               {"values", std::vector<double>(m->data(), m->data() + m->size())}});
    }
    return j;
}

Params params_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format") != "mmdes-cross-attention/1") throw DataError("unsupported cross-attention format");
        const Dims dims{j.at("dims").at("audio").get<Index>(), j.at("dims").at("video").get<Index>(),
                        j.at("dims").at("clips").get<Index>()};
        Params p = Params::zeros(dims);
        auto blocks = p.blocks();
        const auto& arr = j.at("blocks");
        if (arr.size() != kBlockCount) throw DataError("cross-attention JSON: expected 9 blocks");
        for (std::size_t b = 0; b < kBlockCount; ++b) {
            const auto& bj = arr[b];
            if (bj.at("name").get<std::string>() != Params::block_names()[b]) {
                throw DataError("cross-attention JSON: block " + std::to_string(b) + " is misnamed");
            }
            const auto values = bj.at("values").get<std::vector<double>>();
            if (bj.at("rows").get<Index>() != blocks[b]->rows() || bj.at("cols").get<Index>() != blocks[b]->cols() ||
                static_cast<Index>(values.size()) != blocks[b]->size()) {
                throw DataError("cross-attention JSON: block '" + bj.at("name").get<std::string>() +
                                "' has the wrong shape");
            }
            std::copy(values.begin(), values.end(), blocks[b]->data());
        }
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("cross-attention JSON: ") + e.what());
    }
}

void write_loss_trace(const std::filesystem::path& path, const std::vector<double>& trace) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "epoch,loss\n";
    for (std::size_t i = 0; i < trace.size(); ++i) out << i << ',' << format_double(trace[i]) << '\n';
}

}  // namespace mmdes::xatt
