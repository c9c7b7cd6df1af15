#pragma once

#include <specprune/core.hpp>
#include <specprune/pruning.hpp>
#include <specprune/synth.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace specprune {

namespace fs = std::filesystem;
using Json = nlohmann::json;

/// Sidecar header of a raw cube. dtype and interleave are fixed in v1.
struct CubeHeader {
    Index lines = 0;
    Index samples = 0;
    Index bands = 0;
    std::string dtype = "f64le";
    std::string interleave = "pixel-major";
    std::vector<double> wavelengths;
};

/// Raw file paired with a header: same stem, ".bin" suffix.
fs::path raw_path_for(const fs::path &header_path);

/// Reads <stem>.json + <stem>.bin (little-endian doubles, all bands of pixel
/// 0 first).
HsiCube load_cube(const fs::path &header_path);
void save_cube(const HsiCube &cube, const fs::path &header_path);

/// CSV: atom name then L reflectances per row; an optional leading
/// "wavelength,..." row; '#' comments and blank lines skipped.
SpectralLibrary load_library(const fs::path &path);
/// Writes values with 17 significant digits, so load_library round-trips.
void save_library(const SpectralLibrary &lib, const fs::path &path);

/// Serialises with sorted keys, two-space indent, and every floating-point
/// number printed with printf("%.<precision>g"); non-finite numbers become
/// null. Identical values always produce identical bytes.
std::string dump_json(const Json &doc, int precision = 12);

void write_text(const fs::path &path, const std::string &text);
std::string read_text(const fs::path &path);
Json read_json(const fs::path &path);

struct ReportMetrics {
    std::optional<double> asad;
    std::optional<double> sre_db;
    std::optional<double> detection;
    /// "clean" when scored against scene truth, "input" otherwise.
    std::string sre_reference = "input";
};

struct Report {
    std::string algorithm;
    PruneResult result;
    std::vector<std::string> selected_names;
    Json config = Json::object();
    ReportMetrics metrics;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> notes;
};

Json report_to_json(const Report &report);
/// JSON document with selected_indices, selected_names, scores, config,
/// metrics and seed (plus algorithm, base_nuclear_norm, per-atom iterations
/// and notes), floats at %.12g.
void save_report(const Report &report, const fs::path &path);

struct ReportSummary {
    std::string algorithm;
    IndexSet selected;
    std::vector<double> scores;
};
ReportSummary load_report(const fs::path &path);

/// Ground truth of a synthetic scene as persisted next to its cube.
struct TruthRecord {
    SceneSpec spec;
    IndexSet indices;
    std::vector<std::string> names;
    Matrix abundances;
    std::string library;
    std::string cube;
};

void save_truth(const TruthRecord &truth, const fs::path &path);
TruthRecord load_truth(const fs::path &path);

/// One row per pixel, one column per atom, header row of atom names.
void save_abundances_csv(const AbundanceMatrix &m, const std::vector<std::string> &names,
                         const fs::path &path);

} // namespace specprune
