#include "mmdes/imputation.hpp"

#include "mmdes/error.hpp"

namespace mmdes {

ImputationMode ImputationMode::parse(std::string_view label) {
    if (label == "none") return none();
    const auto sep = label.find('_');
    if (sep == std::string_view::npos) {
        throw ConfigError("unknown scenario '" + std::string(label) + "'");
    }
    const auto kind = label.substr(0, sep);
    Modality m;
    try {
        m = parse_modality(label.substr(sep + 1));
    } catch (const DataError&) {
        throw ConfigError("unknown scenario '" + std::string(label) + "'");
    }
    if (kind == "zero") return zero(m);
    if (kind == "mean") return mean(m);
    throw ConfigError("unknown scenario '" + std::string(label) + "'");
}

std::string ImputationMode::label() const {
    if (kind_ == ImputationKind::None) return "none";
    return std::string(kind_ == ImputationKind::Zero ? "zero_" : "mean_") + std::string(to_string(*target_));
}

std::string ImputationMode::title() const {
    if (kind_ == ImputationKind::None) return "Audio and video available";
    const std::string which = *target_ == Modality::Audio ? "Audio" : "Video";
    return which + (kind_ == ImputationKind::Zero ? " disabled (zero vector)" : " disabled (mean vector)");
}

ModalityMeans compute_means(std::span<const PersonRecord> train_persons) {
    Index frames = 0;
    for (const auto& p : train_persons) frames += p.frames();
    if (frames == 0) throw DataError("cannot compute feature means of an empty training set");
    ModalityMeans means;
    for (std::size_t g = 0; g < train_persons.front().groups.size(); ++g) {
        const auto& first = train_persons.front().groups[g];
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(first.dim());
        for (const auto& p : train_persons) sum += p.groups.at(g).values.colwise().sum().transpose();
        means.by_group[first.name] = sum / static_cast<double>(frames);
    }
    return means;
}

namespace {

const Eigen::VectorXd& mean_for(const ModalityMeans& means, const std::string& group, Index dim) {
    const auto it = means.by_group.find(group);
    if (it == means.by_group.end()) throw DataError("no mean vector for group '" + group + "'");
    if (it->second.size() != dim) throw DataError("mean vector for group '" + group + "' has the wrong dim");
    return it->second;
}

}  // namespace

PersonRecord apply_imputation(const PersonRecord& record, const ImputationMode& mode,
                              const ModalityMeans& means) {
    PersonRecord out = record;
    if (mode.kind() == ImputationKind::None) return out;
    for (auto& g : out.groups) {
        if (!mode.affects(g.modality)) continue;
        if (mode.kind() == ImputationKind::Zero) {
            g.values.setZero();
        } else {
            const auto& mean = mean_for(means, g.name, g.dim());
            g.values.rowwise() = mean.transpose();
        }
    }
    return out;
}

namespace {

void impute_row(Eigen::Ref<Eigen::RowVectorXd> x, const SampleLayout& layout, const ImputationMode& mode,
                const ModalityMeans& means) {
    for (const auto& g : layout.groups) {
        if (!mode.affects(g.modality)) continue;
        if (mode.kind() == ImputationKind::Zero) {
            x.segment(g.offset, g.width).setZero();
        } else {
            const auto& mean = mean_for(means, g.name, g.dim);
            for (Index j = 0; j < layout.context_len; ++j) {
                x.segment(g.offset + j * g.dim, g.dim) = mean.transpose();
            }
        }
    }
}

}  // namespace

FrameSample apply_imputation(const FrameSample& sample, const SampleLayout& layout,
                             const ImputationMode& mode, const ModalityMeans& means) {
    if (sample.x.size() != layout.width()) throw DataError("frame sample does not match the layout width");
    FrameSample out = sample;
    if (mode.kind() == ImputationKind::None) return out;
    Eigen::RowVectorXd row = out.x.transpose();
    impute_row(row, layout, mode, means);
    out.x = row.transpose();
    return out;
}

FrameSamples apply_imputation(const FrameSamples& samples, const ImputationMode& mode,
                              const ModalityMeans& means) {
    FrameSamples out = samples;
    if (mode.kind() == ImputationKind::None) return out;
    for (Index r = 0; r < out.x.rows(); ++r) {
        Eigen::RowVectorXd row = out.x.row(r);
        impute_row(row, out.layout, mode, means);
        out.x.row(r) = row;
    }
    return out;
}

}  // namespace mmdes
