#include "mmdes/standardize.hpp"

#include "mmdes/error.hpp"

#include <cmath>

namespace mmdes {

Standardizer Standardizer::fit(std::span<const PersonRecord> persons) {
    if (persons.empty()) throw DataError("cannot fit standardization on zero persons");
    Standardizer s;
    const std::size_t groups = persons.front().groups.size();
    for (std::size_t g = 0; g < groups; ++g) {
        const Index dim = persons.front().groups[g].dim();
        Eigen::VectorXd sum = Eigen::VectorXd::Zero(dim);
        Index n = 0;
        for (const auto& p : persons) {
            sum += p.groups.at(g).values.colwise().sum().transpose();
            n += p.frames();
        }
        if (n == 0) throw DataError("cannot fit standardization on zero frames");
        const Eigen::VectorXd mean = sum / static_cast<double>(n);
        Eigen::VectorXd sq = Eigen::VectorXd::Zero(dim);
        for (const auto& p : persons) {
            sq += (p.groups[g].values.rowwise() - mean.transpose()).cwiseAbs2().colwise().sum().transpose();
        }
        Eigen::VectorXd scale = (sq / static_cast<double>(n)).cwiseSqrt();
        for (Index d = 0; d < dim; ++d) {
            if (!(scale(d) > 1e-12)) scale(d) = 1.0;
        }
        s.means_.push_back(mean);
        s.scales_.push_back(scale);
    }
    return s;
}

PersonRecord Standardizer::apply(const PersonRecord& record) const {
    if (record.groups.size() != means_.size()) {
        throw DataError("person '" + record.id + "' does not match the standardization schema");
    }
    PersonRecord out = record;
    for (std::size_t g = 0; g < means_.size(); ++g) {
        auto& values = out.groups[g].values;
        if (values.cols() != means_[g].size()) {
            throw DataError("person '" + record.id + "', group '" + out.groups[g].name +
                            "': dimension differs from the standardization fit");
        }
        values = (values.rowwise() - means_[g].transpose()).array().rowwise() / scales_[g].transpose().array();
    }
    return out;
}

}  // namespace mmdes
