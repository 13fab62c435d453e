#pragma once

#include "mmdes/types.hpp"

#include <span>
#include <string>
#include <vector>

namespace mmdes {

inline constexpr Index kDefaultContextLen = 8;

/// Where one group's context window lives inside a frame sample vector.
/// Within the slice, lag positions run oldest to newest, each holding `dim`
/// values: x[offset + j*dim + k] is feature k of frame t - context_len + 1 + j.
struct GroupSlice {
    std::string name;
    Modality modality = Modality::Audio;
    Index dim = 0;
    Index offset = 0;
    Index width = 0;
};

struct SampleLayout {
    std::vector<GroupSlice> groups;
    Index context_len = 1;

    static SampleLayout from_schema(const std::vector<GroupSpec>& schema, Index context_len);

    Index width() const;
    const GroupSlice& slice(std::string_view name) const;
    bool operator==(const SampleLayout& other) const;
};

struct FrameSample {
    std::string person_id;
    Index frame_index = 0;
    Eigen::VectorXd x;
    Eigen::Vector2d y;
};

/// A contiguous run of rows belonging to one person.
struct Segment {
    std::string person_id;
    Index begin = 0;
    Index length = 0;
};

/// All frame samples of one or more persons stored row-wise.
struct FrameSamples {
    SampleLayout layout;
    Eigen::MatrixXd x;  ///< frames x layout.width()
    Eigen::MatrixXd y;  ///< frames x 2 (arousal, valence)
    std::vector<Segment> segments;

    Index size() const { return x.rows(); }
    FrameSample at(Index row) const;
    /// Columns of one group's slice for every row.
    Eigen::MatrixXd group_block(const GroupSlice& g) const { return x.middleCols(g.offset, g.width); }
};

/// Context windows of every frame of `record`, left-padded by repeating frame 0.
FrameSamples frame_samples(const PersonRecord& record, Index context_len);

/// Row-wise concatenation; all parts must share one layout.
FrameSamples concat(std::span<const FrameSamples> parts);

/// The newest `key_context` frames of every group from each sample: the
/// joint feature vector used as nearest-neighbour key.
Eigen::MatrixXd neighbor_keys(const FrameSamples& samples, Index key_context);

}  // namespace mmdes
