#pragma once

#include "mmdes/neighbor_index.hpp"
#include "mmdes/regressor_pool.hpp"

#include <limits>
#include <span>
#include <vector>

namespace mmdes {

inline constexpr Index kDefaultK = 100;
/// Floor applied to neighbour distances before inversion.
inline constexpr double kDistanceFloor = 1e-9;
/// Floor applied to each regressor's weighted error sum before inversion.
inline constexpr double kErrorFloor = 1e-12;

/// The K validation frames nearest a test frame (the competence region),
/// with their distances and the K x N squared-error rows of the pool.
struct CompetenceRegion {
    std::vector<Index> indices;
    Eigen::VectorXd distances;  ///< ascending
    Eigen::MatrixXd errors;     ///< K x N

    Index size() const { return distances.size(); }
    Index pool_size() const { return errors.cols(); }
};

CompetenceRegion make_region(const std::vector<Neighbor>& neighbors, const ValidationErrorTable& table);

/// Query `index` and gather the region in one step; K is clamped to the table size.
CompetenceRegion competence_region(const NeighborIndex& index, const ValidationErrorTable& table,
                                   std::span<const double> query, Index k);

/// Regressor weights alpha (a probability vector) and which regressors
/// took part in the combination.
struct SelectionWeights {
    Eigen::VectorXd alpha;
    std::vector<bool> selected;

    static SelectionWeights uniform(Index n);
    /// All weight on `winner`.
    static SelectionWeights one_hot(Index n, Index winner);
};

/// Inverse-distance neighbour weights d_k = (1/dist_k) / sum_j (1/dist_j),
/// distances floored at kDistanceFloor. Throws DataError on an empty or negative input.
Eigen::VectorXd neighbor_weights(std::span<const double> distances);

/// alpha_i proportional to 1 / sum_k d_k sqe_{k,i}, normalized over the
/// regressors in `mask` (all when empty); masked-out regressors get 0.
SelectionWeights regressor_weights(const CompetenceRegion& region, const std::vector<bool>& mask = {});

/// Dynamic selection: the regressor with the smallest unweighted accumulated
/// error over the region; ties go to the lowest index.
Index ds_select(const CompetenceRegion& region);

/// sum_i alpha_i * prediction_i.
double dw_combine(std::span<const double> predictions, const SelectionWeights& weights);

double mean_combine(std::span<const double> predictions);

/// Rule for discarding regressors before weighting.
struct DwsThreshold {
    enum class Kind { PoolMean, Absolute };
    Kind kind = Kind::PoolMean;
    double value = 0.0;

    static DwsThreshold pool_mean() { return {Kind::PoolMean, 0.0}; }
    static DwsThreshold absolute(double v) { return {Kind::Absolute, v}; }
    static DwsThreshold infinite() { return absolute(std::numeric_limits<double>::infinity()); }
};

/// Dynamic weighting with selection: regressors whose mean error over the
/// region exceeds the threshold are dropped and the survivors reweighted.
/// Falls back to weighting the full pool when nothing survives.
SelectionWeights dws_filter(const CompetenceRegion& region, const DwsThreshold& threshold);

}  // namespace mmdes
