#include "mmdes/neighbor_index.hpp"

#include "mmdes/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace mmdes {

std::string_view to_string(DistanceMetric m) {
    return m == DistanceMetric::Euclidean ? "euclidean" : "manhattan";
}

DistanceMetric parse_metric(std::string_view text) {
    if (text == "euclidean") return DistanceMetric::Euclidean;
    if (text == "manhattan") return DistanceMetric::Manhattan;
    throw ConfigError("unknown distance metric '" + std::string(text) + "'");
}

NeighborIndex::NeighborIndex(const Eigen::MatrixXd& keys, DistanceMetric metric)
    : rows_(keys.rows()), cols_(keys.cols()), metric_(metric) {
    if (rows_ == 0) throw DataError("neighbor index: no validation rows");
    if (!keys.allFinite()) throw DataError("neighbor index: non-finite key");
    store_.resize(static_cast<std::size_t>(rows_ * cols_));
    for (Index r = 0; r < rows_; ++r) {
        for (Index c = 0; c < cols_; ++c) store_[static_cast<std::size_t>(r * cols_ + c)] = keys(r, c);
    }
}

std::vector<Neighbor> NeighborIndex::query(std::span<const double> query, Index k) const {
    if (static_cast<Index>(query.size()) != cols_) {
        throw DataError("neighbor query has dimension " + std::to_string(query.size()) + ", index has " +
                        std::to_string(cols_));
    }
    if (k < 1) throw DataError("neighbor query: k must be >= 1");
    k = std::min(k, rows_);

    // Max-heap on (raw distance, index): the top is the current worst kept row.
    using Entry = std::pair<double, Index>;
    std::priority_queue<Entry> heap;
    const double* row = store_.data();
    const double* q = query.data();
    const bool euclid = metric_ == DistanceMetric::Euclidean;
    for (Index i = 0; i < rows_; ++i, row += cols_) {
        const bool full = static_cast<Index>(heap.size()) == k;
        const double bound = full ? heap.top().first : std::numeric_limits<double>::infinity();
        double acc = 0.0;
        Index c = 0;
        for (; c < cols_; ++c) {
            const double d = q[c] - row[c];
            acc += euclid ? d * d : std::abs(d);
            if (acc > bound) break;
        }
        if (c < cols_) continue;
        const Entry e{acc, i};
        if (!full) {
            heap.push(e);
        } else if (e < heap.top()) {
            heap.pop();
            heap.push(e);
        }
    }

    std::vector<Entry> kept;
    kept.reserve(heap.size());
    while (!heap.empty()) {
        kept.push_back(heap.top());
        heap.pop();
    }
    std::sort(kept.begin(), kept.end());
    std::vector<Neighbor> out;
    out.reserve(kept.size());
    for (const auto& [raw, idx] : kept) out.push_back({idx, euclid ? std::sqrt(raw) : raw});
    return out;
}

}  // namespace mmdes
