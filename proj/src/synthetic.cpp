#include "mmdes/synthetic.hpp"

#include "mmdes/error.hpp"
#include "mmdes/rng.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace mmdes {

std::vector<GroupSpec> SyntheticConfig::default_groups() {
    return {
        {"acoustic", Modality::Audio, 6},
        {"mfcc", Modality::Audio, 5},
        {"mel", Modality::Audio, 5},
        {"appearance", Modality::Video, 5},
        {"geometric", Modality::Video, 4},
    };
}

Eigen::VectorXd latent_signal(Index frames, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::VectorXd s = Eigen::VectorXd::Zero(frames);
    const double T = static_cast<double>(frames);
    for (int c = 0; c < 3; ++c) {
        const double amplitude = rng.uniform(0.5, 1.0);
        const double period = rng.uniform(T / 10.0, T / 2.0);
        const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
        for (Index t = 0; t < frames; ++t) {
            s(t) += amplitude * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / period + phase);
        }
    }
    const double peak = s.cwiseAbs().maxCoeff();
    if (peak > 0.0) s /= peak;
    return s;
}

MultimodalDataset generate_synthetic(const SyntheticConfig& config, std::uint64_t seed) {
    if (config.persons <= 0) throw ConfigError("synthetic persons must be positive");
    if (config.frames <= 0) throw ConfigError("synthetic frames must be positive");
    if (config.groups.empty()) throw ConfigError("synthetic schema needs at least one group");
    for (const auto& g : config.groups) {
        if (g.dim <= 0) throw ConfigError("synthetic group '" + g.name + "' must have positive dim");
    }
    if (!(config.noise >= 0.0)) throw ConfigError("synthetic noise must be >= 0");
    if (!(config.cross_informativeness >= 0.0 && config.cross_informativeness <= 1.0)) {
        throw ConfigError("cross_informativeness must lie in [0, 1]");
    }

    // Primary and cross mixing vector per group.
    std::vector<Eigen::VectorXd> primary;
    std::vector<Eigen::VectorXd> cross;
    Rng mixing(derive_seed(seed, "mixing"));
    for (const auto& g : config.groups) {
        Eigen::VectorXd p(g.dim), c(g.dim);
        for (Index i = 0; i < g.dim; ++i) p(i) = mixing.normal();
        for (Index i = 0; i < g.dim; ++i) c(i) = mixing.normal();
        primary.push_back(std::move(p));
        cross.push_back(std::move(c));
    }

    std::vector<PersonRecord> persons;
    for (Index n = 0; n < config.persons; ++n) {
        const auto idx = static_cast<std::uint64_t>(n);
        const Eigen::VectorXd arousal = latent_signal(config.frames, derive_seed(seed, "arousal", idx));
        const Eigen::VectorXd valence = latent_signal(config.frames, derive_seed(seed, "valence", idx));
        Rng noise(derive_seed(seed, "noise", idx));

        PersonRecord person;
        char id[16];
        std::snprintf(id, sizeof(id), "P%02lld", static_cast<long long>(n + 1));
        person.id = id;
        person.labels.resize(config.frames, 2);
        person.labels.col(0) = arousal;
        person.labels.col(1) = valence;

        for (std::size_t g = 0; g < config.groups.size(); ++g) {
            const auto& spec = config.groups[g];
            const bool audio = spec.modality == Modality::Audio;
            const Eigen::VectorXd& own = audio ? arousal : valence;
            const Eigen::VectorXd& other = audio ? valence : arousal;
            Eigen::MatrixXd values = own * primary[g].transpose() +
                                     config.cross_informativeness * other * cross[g].transpose();
            if (config.noise > 0.0) {
                for (Index t = 0; t < config.frames; ++t) {
                    for (Index d = 0; d < spec.dim; ++d) values(t, d) += config.noise * noise.normal();
                }
            }
            person.groups.push_back({spec.name, spec.modality, std::move(values)});
        }
        persons.push_back(std::move(person));
    }
    return MultimodalDataset(config.groups, std::move(persons), config.frame_rate_hz);
}

}  // namespace mmdes
