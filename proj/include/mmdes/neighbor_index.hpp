#pragma once

#include "mmdes/types.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace mmdes {

enum class DistanceMetric { Euclidean, Manhattan };

std::string_view to_string(DistanceMetric m);
DistanceMetric parse_metric(std::string_view text);

struct Neighbor {
    Index index = 0;
    double distance = 0.0;
};

/// Exact brute-force k-nearest-neighbour search over the rows of a key
/// matrix. Results are sorted by distance, ties by lower row index.
///
/// Distances accumulate coordinate by coordinate in index order; a candidate
/// is abandoned once its partial sum exceeds the current k-th best, which
/// never changes which rows are returned.
class NeighborIndex {
public:
    explicit NeighborIndex(const Eigen::MatrixXd& keys, DistanceMetric metric = DistanceMetric::Euclidean);

    /// The min(k, size()) nearest rows to `query`. Throws DataError on a
    /// dimension mismatch or k < 1.
    std::vector<Neighbor> query(std::span<const double> query, Index k) const;

    Index size() const { return rows_; }
    Index dim() const { return cols_; }
    DistanceMetric metric() const { return metric_; }

private:
    std::vector<double> store_;  // row-major
    Index rows_ = 0;
    Index cols_ = 0;
    DistanceMetric metric_;
};

}  // namespace mmdes
