#pragma once

#include <span>
#include <vector>

namespace mmdes {

/// Concordance correlation coefficient with population (1/n) moments:
///   2 cov(y, yhat) / (var(y) + var(yhat) + (mean(y) - mean(yhat))^2).
/// Two identical constant series score 1. Throws DataError on length
/// mismatch, fewer than two values or non-finite input.
double ccc(std::span<const double> y, std::span<const double> yhat);

/// Population Pearson correlation. Throws DataError if either series is constant.
double pearson(std::span<const double> y, std::span<const double> yhat);

std::vector<double> squared_errors(std::span<const double> y, std::span<const double> yhat);

}  // namespace mmdes
