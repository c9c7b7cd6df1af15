#pragma once

#include <specprune/core.hpp>

#include <cstdint>
#include <optional>

namespace specprune {

struct SceneSpec {
    Index n_pixels = 1000;
    Index n_endmembers = 5;
    double max_purity = 1.0;
    std::optional<double> snr_db;
    std::uint64_t seed = 0;
    /// Drawn uniformly without replacement when unset.
    std::optional<IndexSet> library_indices;
};

struct SceneTruth {
    IndexSet indices;
    /// N x P abundances over the chosen atoms, in `indices` order.
    AbundanceMatrix abundances;
    HsiCube clean_cube;
    HsiCube noisy_cube;
};

/// Rows uniform on the simplex (Dirichlet(1)) with every entry at most
/// `max_purity`. Rows over the cap are redrawn up to 10^4 times, then capped
/// and renormalised deterministically.
Matrix generate_abundances(Index n, Index p, double max_purity, std::uint64_t seed);

/// Linear mixture of library atoms plus white Gaussian noise rescaled to hit
/// snr_db = 10 log10(||clean||_F^2 / ||noise||_F^2) exactly.
SceneTruth generate_scene(const SpectralLibrary &lib, const SceneSpec &spec);

/// Library of smooth, nonnegative spectra (a small offset plus one to three
/// Gaussian bumps with standard deviation 1-5% of the range) over
/// 400-2500 nm. Candidate atoms whose absolute cosine with an accepted atom
/// exceeds `max_coherence` are rejected, up to 10^5 candidates per atom.
SpectralLibrary generate_library(Index atoms, Index bands, double max_coherence,
                                 std::uint64_t seed);

} // namespace specprune
