#pragma once

#include <specprune/commands.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace specprune {

struct SyntheticLibrarySpec {
    Index atoms = 40;
    Index bands = 100;
    double max_coherence = 0.8;
    std::uint64_t seed = 1;
};

/// Factorial sweep over scene parameters.
///
/// Every (cell, trial) pair is one scene generated with seed
/// base_seed + cell * trials_per_cell + trial; all algorithms of that trial
/// see the same scene.
struct ExperimentSpec {
    std::optional<fs::path> library;
    SyntheticLibrarySpec synthetic_library;
    std::vector<Index> n_pixels{1000};
    std::vector<Index> n_endmembers{5};
    std::vector<double> max_purity{1.0};
    /// nullopt entries mean noiseless.
    std::vector<std::optional<double>> snr_db{std::nullopt};
    int trials_per_cell = 1;
    std::uint64_t base_seed = 0;
    std::vector<Algorithm> algorithms{Algorithm::kNnd};
    SolverOverrides solver;
    bool denoise = true;
    double residual_tol = 1e-4;

    void validate() const;
};

/// Reads a JSON spec; a relative library path is taken relative to the file.
ExperimentSpec load_experiment_spec(const fs::path &path);

struct ExperimentRow {
    std::size_t cell = 0;
    int trial = 0;
    Algorithm algorithm = Algorithm::kNnd;
    Index n_pixels = 0;
    Index n_endmembers = 0;
    double max_purity = 0.0;
    std::optional<double> snr_db;
    std::uint64_t seed = 0;
    /// min true-atom score minus max other score (nnd only, else NaN).
    double delta_margin = 0.0;
    bool detected = false;
    /// Detection when the smallest scores are selected instead (nnd only).
    bool detected_min_order = false;
    IndexSet truth;
    IndexSet selected;
    double sre_db = 0.0;
    double asad = 0.0;
    double wall_ms = 0.0;
};

struct CellSummary {
    std::size_t cell = 0;
    Algorithm algorithm = Algorithm::kNnd;
    Index n_pixels = 0;
    Index n_endmembers = 0;
    double max_purity = 0.0;
    std::optional<double> snr_db;
    int trials = 0;
    double detection_probability = 0.0;
    double detection_probability_min_order = 0.0;
    double mean_sre_db = 0.0;
    double mean_asad = 0.0;
};

/// Rows in (cell, trial, algorithm) order regardless of scheduling.
std::vector<ExperimentRow> run_experiment(const ExperimentSpec &spec, const SpectralLibrary &lib,
                                          std::size_t threads = 0);

SpectralLibrary experiment_library(const ExperimentSpec &spec);

std::vector<CellSummary> summarize(const std::vector<ExperimentRow> &rows);

std::string rows_to_csv(const std::vector<ExperimentRow> &rows, bool timing);
std::string summary_to_csv(const std::vector<CellSummary> &cells);

/// Writes the per-trial CSV to `out` and the per-cell aggregates next to it
/// as <stem>.summary.csv.
std::vector<ExperimentRow> cmd_experiment(const fs::path &spec_path, const fs::path &out,
                                          bool timing, std::size_t threads = 0);

} // namespace specprune
