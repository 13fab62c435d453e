#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace mmdes {

struct SplitRepetition {
    std::vector<std::string> train_ids;
    std::vector<std::string> val_ids;
    std::vector<std::string> test_ids;
};

struct SplitPlan {
    std::vector<SplitRepetition> repetitions;
    std::uint64_t seed = 0;
};

inline constexpr std::size_t kDefaultRepetitions = 10;
inline constexpr std::size_t kDefaultTestPersons = 3;
inline constexpr std::size_t kDefaultValPersons = 3;

/// Person-disjoint train/validation/test splits. Repetition r shuffles the
/// ids with its own stream derived from (seed, r). Test takes the
/// `test_count` least-tested ids so far (shuffle order breaks ties); of the
/// rest, in shuffle order, the first `val_count` go to validation and the
/// remainder to train.
/// Throws ConfigError unless at least one training person remains.
SplitPlan make_split_plan(const std::vector<std::string>& person_ids, std::size_t repetitions,
                          std::uint64_t seed, std::size_t test_count = kDefaultTestPersons,
                          std::size_t val_count = kDefaultValPersons);

}  // namespace mmdes
