#include "mmdes/types.hpp"

#include "mmdes/error.hpp"

#include <set>

namespace mmdes {

std::string_view to_string(Modality m) {
    return m == Modality::Audio ? "audio" : "video";
}

Modality parse_modality(std::string_view text) {
    if (text == "audio" || text == "Audio") return Modality::Audio;
    if (text == "video" || text == "Video") return Modality::Video;
    throw DataError("unknown modality '" + std::string(text) + "' (expected audio or video)");
}

std::string_view to_string(Target t) {
    return t == Target::Arousal ? "arousal" : "valence";
}

Target parse_target(std::string_view text) {
    if (text == "arousal") return Target::Arousal;
    if (text == "valence") return Target::Valence;
    throw ConfigError("unknown target '" + std::string(text) + "' (expected arousal or valence)");
}

const FeatureGroup& PersonRecord::group(std::string_view name) const {
    for (const auto& g : groups) {
        if (g.name == name) return g;
    }
    throw DataError("person '" + id + "' has no feature group '" + std::string(name) + "'");
}

void PersonRecord::validate() const {
    if (labels.cols() != 2) {
        throw DataError("person '" + id + "': label track must have 2 columns (arousal, valence)");
    }
    if (!labels.allFinite()) {
        throw DataError("person '" + id + "': label track contains non-finite values");
    }
    std::set<std::string> seen;
    for (const auto& g : groups) {
        if (!seen.insert(g.name).second) {
            throw DataError("person '" + id + "': duplicate feature group '" + g.name + "'");
        }
        if (g.dim() <= 0) {
            throw DataError("person '" + id + "', group '" + g.name + "': dimension must be positive");
        }
        if (g.frames() != frames()) {
            throw DataError("person '" + id + "', group '" + g.name + "': " +
                            std::to_string(g.frames()) + " frames but labels have " +
                            std::to_string(frames()));
        }
        if (!g.values.allFinite()) {
            throw DataError("person '" + id + "', group '" + g.name + "': non-finite feature value");
        }
    }
}

MultimodalDataset::MultimodalDataset(std::vector<GroupSpec> schema, std::vector<PersonRecord> persons,
                                     double frame_rate_hz)
    : schema_(std::move(schema)), persons_(std::move(persons)), frame_rate_hz_(frame_rate_hz) {
    if (!(frame_rate_hz_ > 0.0)) throw DataError("frame_rate_hz must be positive");
    if (schema_.empty()) throw DataError("dataset schema has no feature groups");
    std::set<std::string> ids;
    for (const auto& p : persons_) {
        if (!ids.insert(p.id).second) throw DataError("duplicate person id '" + p.id + "'");
        p.validate();
        if (p.groups.size() != schema_.size()) {
            throw DataError("person '" + p.id + "' has " + std::to_string(p.groups.size()) +
                            " groups, schema declares " + std::to_string(schema_.size()));
        }
        for (std::size_t g = 0; g < schema_.size(); ++g) {
            if (p.groups[g].spec() != schema_[g]) {
                throw DataError("person '" + p.id + "': group " + std::to_string(g) + " ('" +
                                p.groups[g].name + "') does not match schema entry '" +
                                schema_[g].name + "'");
            }
        }
    }
}

const PersonRecord& MultimodalDataset::person(std::string_view id) const {
    for (const auto& p : persons_) {
        if (p.id == id) return p;
    }
    throw DataError("unknown person id '" + std::string(id) + "'");
}

std::vector<std::string> MultimodalDataset::person_ids() const {
    std::vector<std::string> ids;
    ids.reserve(persons_.size());
    for (const auto& p : persons_) ids.push_back(p.id);
    return ids;
}

bool MultimodalDataset::operator==(const MultimodalDataset& other) const {
    if (schema_ != other.schema_ || frame_rate_hz_ != other.frame_rate_hz_ ||
        persons_.size() != other.persons_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < persons_.size(); ++i) {
        const auto& a = persons_[i];
        const auto& b = other.persons_[i];
        if (a.id != b.id || a.labels != b.labels || a.groups.size() != b.groups.size()) return false;
        for (std::size_t g = 0; g < a.groups.size(); ++g) {
            if (a.groups[g].spec() != b.groups[g].spec() || a.groups[g].values != b.groups[g].values) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace mmdes
