#include "mmdes/splits.hpp"

#include "mmdes/error.hpp"
#include "mmdes/rng.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace mmdes {

SplitPlan make_split_plan(const std::vector<std::string>& person_ids, std::size_t repetitions,
                          std::uint64_t seed, std::size_t test_count, std::size_t val_count) {
    if (repetitions < 1) throw ConfigError("split plan needs at least one repetition");
    if (test_count < 1 || val_count < 1) throw ConfigError("test and validation sets must be nonempty");
    if (std::set<std::string>(person_ids.begin(), person_ids.end()).size() != person_ids.size()) {
        throw ConfigError("split plan: duplicate person ids");
    }
    if (person_ids.size() < test_count + val_count + 1) {
        throw ConfigError("split plan: " + std::to_string(person_ids.size()) + " persons is too few for " +
                          std::to_string(test_count) + " test + " + std::to_string(val_count) +
                          " validation + at least 1 training person");
    }

    SplitPlan plan;
    plan.seed = seed;
    // Test persons are drawn from the least-tested so far, so every person is
    // tested once before anyone is tested twice.
    std::map<std::string, std::size_t> tested;
    for (std::size_t r = 0; r < repetitions; ++r) {
        std::vector<std::string> ids = person_ids;
        Rng rng(derive_seed(seed, "split", r));
        for (std::size_t i = ids.size() - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(rng.below(i + 1));
            std::swap(ids[i], ids[j]);
        }
        std::vector<std::string> by_count = ids;
        std::stable_sort(by_count.begin(), by_count.end(),
                         [&](const std::string& a, const std::string& b) { return tested[a] < tested[b]; });

        SplitRepetition rep;
        rep.test_ids.assign(by_count.begin(), by_count.begin() + static_cast<std::ptrdiff_t>(test_count));
        const std::set<std::string> test(rep.test_ids.begin(), rep.test_ids.end());
        for (const auto& id : ids) {
            if (test.count(id)) continue;
            (rep.val_ids.size() < val_count ? rep.val_ids : rep.train_ids).push_back(id);
        }
        for (const auto& id : rep.test_ids) ++tested[id];
        plan.repetitions.push_back(std::move(rep));
    }
    return plan;
}

}  // namespace mmdes
