#pragma once

#include "mmdes/rng.hpp"
#include "mmdes/types.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <string>
#include <vector>

namespace testutil {

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("mmdes_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline Eigen::MatrixXd random_matrix(mmdes::Rng& rng, mmdes::Index rows, mmdes::Index cols, double lo = -1.0,
                                     double hi = 1.0) {
    Eigen::MatrixXd m(rows, cols);
    for (mmdes::Index c = 0; c < cols; ++c)
        for (mmdes::Index r = 0; r < rows; ++r) m(r, c) = rng.uniform(lo, hi);
    return m;
}

// Person with the given groups filled from `rng`, labels in [-1, 1].
inline mmdes::PersonRecord random_person(mmdes::Rng& rng, const std::string& id,
                                         const std::vector<mmdes::GroupSpec>& schema, mmdes::Index frames) {
    mmdes::PersonRecord p;
    p.id = id;
    for (const auto& g : schema) p.groups.push_back({g.name, g.modality, random_matrix(rng, frames, g.dim)});
    p.labels = random_matrix(rng, frames, 2);
    return p;
}

inline std::vector<mmdes::GroupSpec> small_schema() {
    return {{"acoustic", mmdes::Modality::Audio, 3}, {"appearance", mmdes::Modality::Video, 2}};
}

}  // namespace testutil
