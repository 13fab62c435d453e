#pragma once

#include <Eigen/Dense>

#include <string>
#include <string_view>
#include <vector>

namespace mmdes {

using Index = Eigen::Index;

enum class Modality { Audio, Video };

std::string_view to_string(Modality m);
Modality parse_modality(std::string_view text);

/// Regression target; the integer value is the column in a label track.
enum class Target { Arousal = 0, Valence = 1 };

std::string_view to_string(Target t);
Target parse_target(std::string_view text);

struct GroupSpec {
    std::string name;
    Modality modality = Modality::Audio;
    Index dim = 0;

    bool operator==(const GroupSpec&) const = default;
};

/// One feature group of one person: a (frames x dim) matrix tagged with its modality.
struct FeatureGroup {
    std::string name;
    Modality modality = Modality::Audio;
    Eigen::MatrixXd values;

    Index dim() const { return values.cols(); }
    Index frames() const { return values.rows(); }
    GroupSpec spec() const { return {name, modality, dim()}; }
};

/// Time-aligned feature groups of one participant plus the (frames x 2)
/// arousal/valence label track.
struct PersonRecord {
    std::string id;
    std::vector<FeatureGroup> groups;
    Eigen::MatrixXd labels;

    Index frames() const { return labels.rows(); }
    const FeatureGroup& group(std::string_view name) const;
    Eigen::VectorXd label_track(Target t) const { return labels.col(static_cast<Index>(t)); }

    /// Throws DataError unless frame counts agree, names are unique and all
    /// values are finite.
    void validate() const;
};

/// A set of persons sharing one group schema. Immutable after construction.
class MultimodalDataset {
public:
    MultimodalDataset(std::vector<GroupSpec> schema, std::vector<PersonRecord> persons,
                      double frame_rate_hz);

    const std::vector<GroupSpec>& schema() const { return schema_; }
    const std::vector<PersonRecord>& persons() const { return persons_; }
    double frame_rate_hz() const { return frame_rate_hz_; }

    const PersonRecord& person(std::string_view id) const;
    std::vector<std::string> person_ids() const;

    bool operator==(const MultimodalDataset& other) const;

private:
    std::vector<GroupSpec> schema_;
    std::vector<PersonRecord> persons_;
    double frame_rate_hz_;
};

}  // namespace mmdes
