#include <specprune/synth.hpp>

#include <specprune/rng.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace specprune {

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// Stream identifiers; one per independent random quantity.
constexpr std::uint64_t kStreamIndices = 1;
constexpr std::uint64_t kStreamAbundances = 2;
constexpr std::uint64_t kStreamNoise = 3;
constexpr std::uint64_t kStreamLibrary = 4;

constexpr int kMaxRedraws = 10000;

} // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix64(seed ^ mix64(stream + kGolden))) {}

std::uint64_t CounterRng::next_u64() {
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform_open_zero() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

std::uint64_t CounterRng::below(std::uint64_t bound) {
    // Reject the top partial block so every residue is equally likely.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
        v = next_u64();
    } while (v >= limit);
    return v % bound;
}

double CounterRng::normal() {
    const double u1 = uniform_open_zero();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double CounterRng::exponential() {
    return -std::log(uniform_open_zero());
}

namespace {

void check_purity(Index p, double max_purity) {
    if (p < 1)
        throw Error(ErrorKind::InvalidArgument, "need at least one endmember");
    if (!(max_purity > 0.0 && max_purity <= 1.0) ||
        max_purity * static_cast<double>(p) < 1.0 - 1e-12)
        throw Error(ErrorKind::InfeasiblePurity,
                    "infeasible purity " + std::to_string(max_purity) + " for " +
                        std::to_string(p) + " endmembers (needs >= 1/p)");
}

// Caps entries at `cap` and spreads the excess over the uncapped entries in
// proportion to their mass, repeating until no entry exceeds the cap.
void cap_and_renormalise(RowVector &row, double cap) {
    std::vector<bool> capped(static_cast<std::size_t>(row.size()), false);
    for (;;) {
        double excess = 0.0;
        bool changed = false;
        for (Index j = 0; j < row.size(); ++j)
            if (row(j) > cap) {
                excess += row(j) - cap;
                row(j) = cap;
                capped[static_cast<std::size_t>(j)] = true;
                changed = true;
            }
        if (!changed)
            break;
        double free_mass = 0.0;
        Index free_count = 0;
        for (Index j = 0; j < row.size(); ++j)
            if (!capped[static_cast<std::size_t>(j)]) {
                free_mass += row(j);
                ++free_count;
            }
        if (free_count == 0)
            break;
        for (Index j = 0; j < row.size(); ++j)
            if (!capped[static_cast<std::size_t>(j)])
                row(j) += free_mass > 0.0 ? excess * row(j) / free_mass
                                          : excess / static_cast<double>(free_count);
    }
    row /= row.sum();
}

} // namespace

Matrix generate_abundances(Index n, Index p, double max_purity, std::uint64_t seed) {
    check_purity(p, max_purity);
    if (n < 1)
        throw Error(ErrorKind::InvalidArgument, "need at least one pixel");
    CounterRng rng(seed, kStreamAbundances);
    Matrix a(n, p);
    for (Index r = 0; r < n; ++r) {
        bool accepted = false;
        for (int attempt = 0; attempt < kMaxRedraws && !accepted; ++attempt) {
            for (Index j = 0; j < p; ++j)
                a(r, j) = rng.exponential();
            a.row(r) /= a.row(r).sum();
            accepted = a.row(r).maxCoeff() <= max_purity;
        }
        if (!accepted) {
            RowVector row = a.row(r);
            cap_and_renormalise(row, max_purity);
            a.row(r) = row;
        }
    }
    return a;
}

SceneTruth generate_scene(const SpectralLibrary &lib, const SceneSpec &spec) {
    const Index k = lib.atoms();
    if (spec.n_pixels < 1)
        throw Error(ErrorKind::InvalidArgument, "n_pixels must be >= 1");
    if (spec.n_endmembers < 1 || spec.n_endmembers > k)
        throw Error(ErrorKind::InvalidArgument, "n_endmembers must be in [1, K]");
    check_purity(spec.n_endmembers, spec.max_purity);

    IndexSet indices;
    if (spec.library_indices) {
        indices = *spec.library_indices;
        indices.check_bound(k);
        if (static_cast<Index>(indices.size()) != spec.n_endmembers)
            throw Error(ErrorKind::InvalidArgument, "library_indices size != n_endmembers");
    } else {
        CounterRng rng(spec.seed, kStreamIndices);
        std::vector<Index> pool(static_cast<std::size_t>(k));
        for (Index i = 0; i < k; ++i)
            pool[static_cast<std::size_t>(i)] = i;
        for (Index i = 0; i < spec.n_endmembers; ++i) {
            const auto j = static_cast<std::size_t>(i) +
                           rng.below(static_cast<std::uint64_t>(k - i));
            std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
        }
        pool.resize(static_cast<std::size_t>(spec.n_endmembers));
        indices = IndexSet(std::move(pool));
    }

    Matrix abund = generate_abundances(spec.n_pixels, spec.n_endmembers, spec.max_purity,
                                       spec.seed);
    const Matrix clean = abund * lib.subset(indices).data();
    Matrix noisy = clean;
    if (spec.snr_db) {
        CounterRng rng(spec.seed, kStreamNoise);
        Matrix noise(clean.rows(), clean.cols());
        for (Index r = 0; r < noise.rows(); ++r)
            for (Index c = 0; c < noise.cols(); ++c)
                noise(r, c) = rng.normal();
        noise *= clean.norm() / (noise.norm() * std::pow(10.0, *spec.snr_db / 20.0));
        noisy += noise;
    }
    return {std::move(indices), AbundanceMatrix(std::move(abund), {true, true}),
            HsiCube(clean, lib.wavelengths()), HsiCube(std::move(noisy), lib.wavelengths())};
}

SpectralLibrary generate_library(Index atoms, Index bands, double max_coherence,
                                 std::uint64_t seed) {
    if (atoms < 2 || bands < 2)
        throw Error(ErrorKind::InvalidArgument, "need at least two atoms and two bands");
    CounterRng rng(seed, kStreamLibrary);
    std::vector<double> wavelengths(static_cast<std::size_t>(bands));
    const RowVector t = RowVector::LinSpaced(bands, 0.0, 1.0);
    for (Index b = 0; b < bands; ++b)
        wavelengths[static_cast<std::size_t>(b)] = 400.0 + 2100.0 * t(b);

    Matrix lib(atoms, bands);
    Index accepted = 0;
    const long max_candidates = 100000L * atoms;
    for (long cand = 0; accepted < atoms; ++cand) {
        if (cand >= max_candidates)
            throw Error(ErrorKind::InvalidArgument,
                        "could not reach coherence " + std::to_string(max_coherence));
        RowVector atom = RowVector::Constant(bands, 0.05 * rng.uniform());
        const int bumps = 1 + static_cast<int>(rng.below(3));
        for (int b = 0; b < bumps; ++b) {
            const double centre = rng.uniform();
            const double width = 0.01 + 0.04 * rng.uniform();
            const double height = 0.2 + 0.8 * rng.uniform();
            atom.array() += height * (-0.5 * ((t.array() - centre) / width).square()).exp();
        }
        bool ok = true;
        for (Index j = 0; j < accepted && ok; ++j)
            ok = std::abs(atom.dot(lib.row(j))) <= max_coherence * atom.norm() * lib.row(j).norm();
        if (ok)
            lib.row(accepted++) = atom;
    }
    std::vector<std::string> names;
    for (Index i = 0; i < atoms; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "synth_%03ld", static_cast<long>(i));
        names.emplace_back(buf);
    }
    return SpectralLibrary(std::move(lib), std::move(names), std::move(wavelengths));
}

} // namespace specprune
