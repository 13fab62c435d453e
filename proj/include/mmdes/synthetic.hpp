#pragma once

#include "mmdes/types.hpp"

#include <cstdint>
#include <vector>

namespace mmdes {

struct SyntheticConfig {
    Index persons = 18;
    Index frames = 1500;
    /// Defaults mirror a five-group pool: three audio and two video groups.
    std::vector<GroupSpec> groups = default_groups();
    /// Standard deviation of the additive per-frame feature noise.
    double noise = 0.3;
    /// Weight of the "other" latent signal in each modality, in [0, 1].
    double cross_informativeness = 0.15;
    double frame_rate_hz = 25.0;

    static std::vector<GroupSpec> default_groups();
};

/// Per-person latent arousal/valence tracks: sums of three random-phase
/// sinusoids with periods in [T/10, T/2], scaled so max |signal| = 1.
Eigen::VectorXd latent_signal(Index frames, std::uint64_t seed);

/// Deterministic stand-in dataset. Audio groups carry A*a(t) + eps*B*v(t),
/// video groups C*v(t) + eps*D*a(t), each plus noise*N(0,1); labels are (a, v).
/// Mixing vectors are drawn once from `seed` and shared by every person.
MultimodalDataset generate_synthetic(const SyntheticConfig& config, std::uint64_t seed);

}  // namespace mmdes
