#pragma once

#include <specprune/core.hpp>
#include <specprune/io.hpp>
#include <specprune/metrics.hpp>
#include <specprune/pruning.hpp>
#include <specprune/solver.hpp>
#include <specprune/synth.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

// Library entry points behind the command-line subcommands. Each one takes
// a plain argument struct, performs the file I/O of its subcommand and
// returns the in-memory results so they can be checked without a process.

namespace specprune {

/// User overrides applied on top of a mode's defaults.
struct SolverOverrides {
    std::optional<double> lambda;
    std::optional<double> rho;
    std::optional<int> max_iter;
    std::optional<double> tol;
    std::optional<bool> nonneg;
    std::optional<bool> sum_to_one;

    SolverConfig apply(SolverConfig base) const;
};

/// Pruning defaults: nonnegativity on, sum-to-one off.
SolverConfig pruning_solver_defaults();
/// Final inversion defaults: nonnegativity and sum-to-one on, residual
/// tolerance 1e-8 and up to 5000 iterations.
SolverConfig unmixing_solver_defaults();

Json config_to_json(const SolverConfig &cfg);

enum class Algorithm { kNnd, kOmp };
std::string to_string(Algorithm a);
Algorithm parse_algorithm(const std::string &name);

struct LibraryArgs {
    Index atoms = 40;
    Index bands = 100;
    double max_coherence = 0.8;
    std::uint64_t seed = 0;
    fs::path out;
};
SpectralLibrary cmd_library(const LibraryArgs &args);

struct SynthArgs {
    fs::path library;
    Index pixels = 1000;
    Index endmembers = 5;
    double purity = 1.0;
    std::optional<double> snr_db;
    std::uint64_t seed = 0;
    fs::path out_dir;
};

struct SynthOutput {
    fs::path cube;
    fs::path truth;
    SceneTruth scene;
};

/// Writes <out>/scene.json, <out>/scene.bin and <out>/truth.json.
SynthOutput cmd_synth(const SynthArgs &args);

struct PruneArgs {
    fs::path cube;
    fs::path library;
    std::size_t p = 0;
    Algorithm algorithm = Algorithm::kNnd;
    bool denoise = true;
    std::optional<double> ridge;
    SolverOverrides solver;
    ScoreOrder order = ScoreOrder::kMaximize;
    double residual_tol = 1e-4;
    fs::path out;
    /// Scene truth; when given, metrics are scored against it.
    std::optional<fs::path> truth;
    std::optional<fs::path> plot;
    std::size_t threads = 0;
};

struct PruneOutput {
    Report report;
    std::vector<std::string> warnings;
};

/// Denoise (unless disabled), prune, invert on the pruned library, save the
/// report.
PruneOutput cmd_prune(const PruneArgs &args);

struct UnmixOutcome {
    AbundanceMatrix abundances;
    SolveDiagnostics diagnostics;
    double sre_db = 0.0;
};

/// Inversion on lib[indices]. An unset lambda resolves against the full
/// library, so different selections of one library share it. SRE is taken
/// against `reference` when given, otherwise against `cube`.
UnmixOutcome unmix_selection(const HsiCube &cube, const SpectralLibrary &lib,
                             const IndexSet &indices, const SolverConfig &cfg,
                             const HsiCube *reference = nullptr);

struct UnmixArgs {
    fs::path cube;
    fs::path library;
    IndexSet indices;
    SolverOverrides solver;
    /// Cube to score the reconstruction against; defaults to the input.
    std::optional<fs::path> reference;
    /// Scene truth whose clean cube is the SRE reference.
    std::optional<fs::path> truth;
    std::optional<fs::path> out;
};

UnmixOutcome cmd_unmix(const UnmixArgs &args);

/// Clean cube of a persisted scene: abundances times the true atoms.
HsiCube clean_cube_from_truth(const TruthRecord &truth, const SpectralLibrary &lib);

/// Scores one selection against scene truth: detection (0/1), ASAD between
/// true and selected atoms, and SRE of the clean cube against the inversion
/// of `cube` on the selected atoms.
EvalReport evaluate_selection(const SpectralLibrary &lib, const IndexSet &truth,
                              const HsiCube &clean, const HsiCube &cube,
                              const IndexSet &selected, const SolverConfig &unmix_cfg);

Json eval_to_json(const EvalReport &eval);

struct EvalArgs {
    fs::path truth;
    fs::path report;
    std::optional<fs::path> library;
    std::optional<fs::path> cube;
    std::optional<fs::path> out;
};

EvalReport cmd_eval(const EvalArgs &args);

} // namespace specprune
