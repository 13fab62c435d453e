#include "mmdes/metrics.hpp"

#include "mmdes/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mmdes {

namespace {

struct Moments {
    double mean_y = 0.0;
    double mean_yhat = 0.0;
    double var_y = 0.0;
    double var_yhat = 0.0;
    double cov = 0.0;
};

void check_pair(std::span<const double> y, std::span<const double> yhat, const char* what) {
    if (y.size() != yhat.size()) {
        throw DataError(std::string(what) + ": length mismatch (" + std::to_string(y.size()) + " vs " +
                        std::to_string(yhat.size()) + ")");
    }
    if (y.size() < 2) throw DataError(std::string(what) + ": needs at least 2 values");
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!std::isfinite(y[i]) || !std::isfinite(yhat[i])) {
            throw DataError(std::string(what) + ": non-finite value at index " + std::to_string(i));
        }
    }
}

Moments moments(std::span<const double> y, std::span<const double> yhat) {
    Moments m;
    const double n = static_cast<double>(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        m.mean_y += y[i];
        m.mean_yhat += yhat[i];
    }
    m.mean_y /= n;
    m.mean_yhat /= n;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double a = y[i] - m.mean_y;
        const double b = yhat[i] - m.mean_yhat;
        m.var_y += a * a;
        m.var_yhat += b * b;
        m.cov += a * b;
    }
    m.var_y /= n;
    m.var_yhat /= n;
    m.cov /= n;
    return m;
}

}  // namespace

double ccc(std::span<const double> y, std::span<const double> yhat) {
    check_pair(y, yhat, "ccc");
    const Moments m = moments(y, yhat);
    const double gap = m.mean_y - m.mean_yhat;
    const double denom = m.var_y + m.var_yhat + gap * gap;
    if (denom == 0.0) return 1.0;
    return 2.0 * m.cov / denom;
}

double pearson(std::span<const double> y, std::span<const double> yhat) {
    check_pair(y, yhat, "pearson");
    const Moments m = moments(y, yhat);
    if (m.var_y == 0.0 || m.var_yhat == 0.0) throw DataError("pearson: zero variance series");
    const double r = m.cov / std::sqrt(m.var_y * m.var_yhat);
    return std::clamp(r, -1.0, 1.0);
}

std::vector<double> squared_errors(std::span<const double> y, std::span<const double> yhat) {
    if (y.size() != yhat.size()) throw DataError("squared_errors: length mismatch");
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - yhat[i];
        out[i] = d * d;
    }
    return out;
}

}  // namespace mmdes
