#include "mmdes/windowing.hpp"

#include "mmdes/error.hpp"

#include <algorithm>

namespace mmdes {

SampleLayout SampleLayout::from_schema(const std::vector<GroupSpec>& schema, Index context_len) {
    if (context_len < 1) throw ConfigError("context_len must be >= 1");
    SampleLayout layout;
    layout.context_len = context_len;
    Index offset = 0;
    for (const auto& g : schema) {
        const Index width = g.dim * context_len;
        layout.groups.push_back({g.name, g.modality, g.dim, offset, width});
        offset += width;
    }
    return layout;
}

Index SampleLayout::width() const {
    return groups.empty() ? 0 : groups.back().offset + groups.back().width;
}

const GroupSlice& SampleLayout::slice(std::string_view name) const {
    for (const auto& g : groups) {
        if (g.name == name) return g;
    }
    throw DataError("sample layout has no group '" + std::string(name) + "'");
}

bool SampleLayout::operator==(const SampleLayout& other) const {
    if (context_len != other.context_len || groups.size() != other.groups.size()) return false;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& a = groups[i];
        const auto& b = other.groups[i];
        if (a.name != b.name || a.modality != b.modality || a.dim != b.dim || a.offset != b.offset ||
            a.width != b.width) {
            return false;
        }
    }
    return true;
}

FrameSample FrameSamples::at(Index row) const {
    FrameSample s;
    for (const auto& seg : segments) {
        if (row >= seg.begin && row < seg.begin + seg.length) {
            s.person_id = seg.person_id;
            s.frame_index = row - seg.begin;
            break;
        }
    }
    s.x = x.row(row).transpose();
    s.y = y.row(row).transpose();
    return s;
}

FrameSamples frame_samples(const PersonRecord& record, Index context_len) {
    std::vector<GroupSpec> schema;
    for (const auto& g : record.groups) schema.push_back(g.spec());
    FrameSamples out;
    out.layout = SampleLayout::from_schema(schema, context_len);
    const Index T = record.frames();
    out.x.resize(T, out.layout.width());
    out.y = record.labels;
    out.segments.push_back({record.id, 0, T});
    for (std::size_t gi = 0; gi < record.groups.size(); ++gi) {
        const auto& values = record.groups[gi].values;
        const auto& slice = out.layout.groups[gi];
        for (Index t = 0; t < T; ++t) {
            for (Index j = 0; j < context_len; ++j) {
                const Index src = std::max<Index>(0, t - context_len + 1 + j);
                out.x.block(t, slice.offset + j * slice.dim, 1, slice.dim) = values.row(src);
            }
        }
    }
    return out;
}

FrameSamples concat(std::span<const FrameSamples> parts) {
    if (parts.empty()) throw DataError("cannot concatenate an empty list of samples");
    FrameSamples out;
    out.layout = parts.front().layout;
    Index rows = 0;
    for (const auto& p : parts) {
        if (!(p.layout == out.layout)) throw DataError("cannot concatenate samples with different layouts");
        rows += p.size();
    }
    out.x.resize(rows, out.layout.width());
    out.y.resize(rows, 2);
    Index at = 0;
    for (const auto& p : parts) {
        out.x.middleRows(at, p.size()) = p.x;
        out.y.middleRows(at, p.size()) = p.y;
        for (const auto& seg : p.segments) out.segments.push_back({seg.person_id, at + seg.begin, seg.length});
        at += p.size();
    }
    return out;
}

Eigen::MatrixXd neighbor_keys(const FrameSamples& samples, Index key_context) {
    const auto& layout = samples.layout;
    if (key_context < 1 || key_context > layout.context_len) {
        throw ConfigError("neighbor key context must lie in [1, context_len]");
    }
    Index width = 0;
    for (const auto& g : layout.groups) width += g.dim * key_context;
    Eigen::MatrixXd keys(samples.size(), width);
    Index col = 0;
    for (const auto& g : layout.groups) {
        const Index w = g.dim * key_context;
        keys.middleCols(col, w) = samples.x.middleCols(g.offset + g.width - w, w);
        col += w;
    }
    return keys;
}

}  // namespace mmdes
