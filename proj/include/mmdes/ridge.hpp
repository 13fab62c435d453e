#pragma once

#include "mmdes/types.hpp"

#include <string>

namespace mmdes {

inline constexpr double kDefaultRidgeLambda = 1.0;

/// Linear model over one feature group's windowed features. The last
/// weight is the bias.
struct Regressor {
    std::string group_name;
    Modality modality = Modality::Audio;
    Eigen::VectorXd weights;
    double lambda = 0.0;

    Index input_dim() const { return weights.size() - 1; }
    double bias() const { return weights(weights.size() - 1); }
    double predict(const Eigen::Ref<const Eigen::VectorXd>& x) const;
    Eigen::VectorXd predict_rows(const Eigen::Ref<const Eigen::MatrixXd>& X) const;
};

/// Solves (X1'X1 + lambda*P) w = X1'y where X1 = [X, 1] and P is the identity
/// with the bias entry zeroed. Throws NumericError on a singular system and
/// DataError on fewer than two rows or a length mismatch.
Regressor train_ridge(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXd>& y,
                      double lambda, std::string group_name = {}, Modality modality = Modality::Audio);

/// Relative residual ||A w - b|| / max(||b||, ||A|| ||w||) of the normal
/// equations of `r` on (X, y).
double normal_equation_residual(const Regressor& r, const Eigen::Ref<const Eigen::MatrixXd>& X,
                                const Eigen::Ref<const Eigen::VectorXd>& y);

}  // namespace mmdes
