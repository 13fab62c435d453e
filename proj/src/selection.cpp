#include "mmdes/selection.hpp"

#include "mmdes/error.hpp"

#include <algorithm>
#include <cmath>

namespace mmdes {

CompetenceRegion make_region(const std::vector<Neighbor>& neighbors, const ValidationErrorTable& table) {
    if (neighbors.empty()) throw DataError("competence region needs at least one neighbour");
    CompetenceRegion region;
    const auto K = static_cast<Index>(neighbors.size());
    region.indices.reserve(neighbors.size());
    region.distances.resize(K);
    region.errors.resize(K, table.pool_size());
    for (Index k = 0; k < K; ++k) {
        const auto& n = neighbors[static_cast<std::size_t>(k)];
        if (n.index < 0 || n.index >= table.frames()) throw DataError("neighbour index outside validation table");
        region.indices.push_back(n.index);
        region.distances(k) = n.distance;
        region.errors.row(k) = table.errors.row(n.index);
    }
    return region;
}

CompetenceRegion competence_region(const NeighborIndex& index, const ValidationErrorTable& table,
                                   std::span<const double> query, Index k) {
    return make_region(index.query(query, std::min(k, table.frames())), table);
}

SelectionWeights SelectionWeights::uniform(Index n) {
    return {Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)),
            std::vector<bool>(static_cast<std::size_t>(n), true)};
}

SelectionWeights SelectionWeights::one_hot(Index n, Index winner) {
    SelectionWeights w{Eigen::VectorXd::Zero(n), std::vector<bool>(static_cast<std::size_t>(n), false)};
    w.alpha(winner) = 1.0;
    w.selected[static_cast<std::size_t>(winner)] = true;
    return w;
}

Eigen::VectorXd neighbor_weights(std::span<const double> distances) {
    if (distances.empty()) throw DataError("neighbor_weights: no distances");
    Eigen::VectorXd d(static_cast<Index>(distances.size()));
    for (std::size_t k = 0; k < distances.size(); ++k) {
        const double dist = distances[k];
        if (!(dist >= 0.0)) throw DataError("neighbor_weights: negative or NaN distance");
        d(static_cast<Index>(k)) = 1.0 / std::max(dist, kDistanceFloor);
    }
    return d / d.sum();
}

SelectionWeights regressor_weights(const CompetenceRegion& region, const std::vector<bool>& mask) {
    const Index N = region.pool_size();
    if (region.size() == 0 || N == 0) throw DataError("regressor_weights: empty competence region");
    if (!mask.empty() && static_cast<Index>(mask.size()) != N) throw DataError("regressor_weights: mask size");
    const Eigen::VectorXd d =
        neighbor_weights(std::span<const double>(region.distances.data(), static_cast<std::size_t>(region.size())));

    SelectionWeights w;
    w.alpha = Eigen::VectorXd::Zero(N);
    w.selected.assign(static_cast<std::size_t>(N), true);
    double total = 0.0;
    for (Index i = 0; i < N; ++i) {
        if (!mask.empty() && !mask[static_cast<std::size_t>(i)]) {
            w.selected[static_cast<std::size_t>(i)] = false;
            continue;
        }
        const double weighted = std::max(d.dot(region.errors.col(i)), kErrorFloor);
        w.alpha(i) = 1.0 / weighted;
        total += w.alpha(i);
    }
    if (total == 0.0) throw DataError("regressor_weights: mask excludes every regressor");
    w.alpha /= total;
    return w;
}

Index ds_select(const CompetenceRegion& region) {
    if (region.size() == 0 || region.pool_size() == 0) throw DataError("ds_select: empty competence region");
    const Eigen::VectorXd accumulated = region.errors.colwise().sum().transpose();
    Index best = 0;
    for (Index i = 1; i < accumulated.size(); ++i) {
        if (accumulated(i) < accumulated(best)) best = i;
    }
    return best;
}

double dw_combine(std::span<const double> predictions, const SelectionWeights& weights) {
    if (static_cast<Index>(predictions.size()) != weights.alpha.size()) {
        throw DataError("dw_combine: " + std::to_string(predictions.size()) + " predictions for " +
                        std::to_string(weights.alpha.size()) + " weights");
    }
    double out = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) out += weights.alpha(static_cast<Index>(i)) * predictions[i];
    return out;
}

double mean_combine(std::span<const double> predictions) {
    if (predictions.empty()) throw DataError("mean_combine: empty pool");
    double sum = 0.0;
    for (double p : predictions) sum += p;
    return sum / static_cast<double>(predictions.size());
}

SelectionWeights dws_filter(const CompetenceRegion& region, const DwsThreshold& threshold) {
    const Index N = region.pool_size();
    if (region.size() == 0 || N == 0) throw DataError("dws_filter: empty competence region");
    const Eigen::VectorXd mean_error = region.errors.colwise().mean().transpose();
    const double limit = threshold.kind == DwsThreshold::Kind::PoolMean ? mean_error.mean() : threshold.value;
    std::vector<bool> keep(static_cast<std::size_t>(N));
    bool any = false;
    for (Index i = 0; i < N; ++i) {
        keep[static_cast<std::size_t>(i)] = !(mean_error(i) > limit);
        any = any || keep[static_cast<std::size_t>(i)];
    }
    if (!any) return regressor_weights(region);
    return regressor_weights(region, keep);
}

}  // namespace mmdes
