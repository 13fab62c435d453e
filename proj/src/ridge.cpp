#include "mmdes/ridge.hpp"

#include "mmdes/error.hpp"

namespace mmdes {

double Regressor::predict(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    if (x.size() != input_dim()) {
        throw DataError("regressor '" + group_name + "' expects " + std::to_string(input_dim()) +
                        " inputs, got " + std::to_string(x.size()));
    }
    return weights.head(input_dim()).dot(x) + bias();
}

Eigen::VectorXd Regressor::predict_rows(const Eigen::Ref<const Eigen::MatrixXd>& X) const {
    if (X.cols() != input_dim()) {
        throw DataError("regressor '" + group_name + "' expects " + std::to_string(input_dim()) +
                        " inputs, got " + std::to_string(X.cols()));
    }
    return (X * weights.head(input_dim())).array() + bias();
}

namespace {

struct NormalSystem {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
};

NormalSystem normal_system(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXd>& y,
                           double lambda) {
    const Index n = X.rows();
    const Index p = X.cols();
    NormalSystem sys;
    sys.A.resize(p + 1, p + 1);
    sys.A.topLeftCorner(p, p) = X.transpose() * X;
    const Eigen::VectorXd col_sums = X.colwise().sum().transpose();
    sys.A.topRightCorner(p, 1) = col_sums;
    sys.A.bottomLeftCorner(1, p) = col_sums.transpose();
    sys.A(p, p) = static_cast<double>(n);
    sys.A.topLeftCorner(p, p).diagonal().array() += lambda;
    sys.b.resize(p + 1);
    sys.b.head(p) = X.transpose() * y;
    sys.b(p) = y.sum();
    return sys;
}

}  // namespace

Regressor train_ridge(const Eigen::Ref<const Eigen::MatrixXd>& X, const Eigen::Ref<const Eigen::VectorXd>& y,
                      double lambda, std::string group_name, Modality modality) {
    if (X.rows() != y.size()) throw DataError("train_ridge: feature/target row mismatch");
    if (X.rows() < 2) throw DataError("train_ridge: needs at least 2 samples");
    if (!(lambda >= 0.0)) throw ConfigError("ridge lambda must be >= 0");
    if (!X.allFinite() || !y.allFinite()) throw DataError("train_ridge: non-finite input");

    const NormalSystem sys = normal_system(X, y, lambda);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sys.A);
    if (qr.rank() < sys.A.cols()) {
        throw NumericError("train_ridge: singular normal equations for group '" + group_name + "' (rank " +
                           std::to_string(qr.rank()) + " of " + std::to_string(sys.A.cols()) + ")");
    }
    Eigen::VectorXd w = qr.solve(sys.b);
    // one step of iterative refinement
    w += qr.solve(sys.b - sys.A * w);
    if (!w.allFinite()) throw NumericError("train_ridge: non-finite solution for group '" + group_name + "'");
    return Regressor{std::move(group_name), modality, std::move(w), lambda};
}

double normal_equation_residual(const Regressor& r, const Eigen::Ref<const Eigen::MatrixXd>& X,
                                const Eigen::Ref<const Eigen::VectorXd>& y) {
    const NormalSystem sys = normal_system(X, y, r.lambda);
    const double scale = std::max(sys.b.norm(), sys.A.norm() * r.weights.norm());
    if (scale == 0.0) return 0.0;
    return (sys.A * r.weights - sys.b).norm() / scale;
}

}  // namespace mmdes
