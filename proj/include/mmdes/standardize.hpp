#pragma once

#include "mmdes/types.hpp"

#include <span>
#include <vector>

namespace mmdes {

/// Per-dimension z-scoring of raw feature groups with statistics pooled over
/// every frame of the fitting persons. Dimensions with (near) zero spread keep
/// scale 1 so they are only centred.
class Standardizer {
public:
    static Standardizer fit(std::span<const PersonRecord> persons);

    PersonRecord apply(const PersonRecord& record) const;

    const std::vector<Eigen::VectorXd>& means() const { return means_; }
    const std::vector<Eigen::VectorXd>& scales() const { return scales_; }

private:
    std::vector<Eigen::VectorXd> means_;
    std::vector<Eigen::VectorXd> scales_;
};

}  // namespace mmdes
