#pragma once

#include "mmdes/types.hpp"
#include "mmdes/windowing.hpp"

#include <map>
#include <optional>
#include <span>
#include <string>

namespace mmdes {

enum class ImputationKind { None, Zero, Mean };

/// How a disabled modality is simulated. `None` carries no target modality.
class ImputationMode {
public:
    ImputationMode() = default;

    static ImputationMode none() { return {}; }
    static ImputationMode zero(Modality m) { return {ImputationKind::Zero, m}; }
    static ImputationMode mean(Modality m) { return {ImputationKind::Mean, m}; }

    /// Parses "none", "zero_audio", "mean_video", ...
    static ImputationMode parse(std::string_view label);

    ImputationKind kind() const { return kind_; }
    std::optional<Modality> target() const { return target_; }
    bool affects(Modality m) const { return kind_ != ImputationKind::None && target_ == m; }

    /// Canonical label: "none", "zero_audio", "mean_video", ...
    std::string label() const;
    /// Row title in report tables.
    std::string title() const;

    bool operator==(const ImputationMode&) const = default;

private:
    ImputationMode(ImputationKind k, Modality m) : kind_(k), target_(m) {}

    ImputationKind kind_ = ImputationKind::None;
    std::optional<Modality> target_;
};

/// Raw-space mean feature vector of each group, keyed by group name.
struct ModalityMeans {
    std::map<std::string, Eigen::VectorXd> by_group;
};

/// Pooled mean over every frame of every training person.
ModalityMeans compute_means(std::span<const PersonRecord> train_persons);

/// Overwrites every group of the target modality with zeros or its mean;
/// other groups and the labels are returned untouched.
PersonRecord apply_imputation(const PersonRecord& record, const ImputationMode& mode,
                              const ModalityMeans& means);

/// Same on windowed samples: the group mean is broadcast over the context window.
FrameSample apply_imputation(const FrameSample& sample, const SampleLayout& layout,
                             const ImputationMode& mode, const ModalityMeans& means);
FrameSamples apply_imputation(const FrameSamples& samples, const ImputationMode& mode,
                              const ModalityMeans& means);

}  // namespace mmdes
