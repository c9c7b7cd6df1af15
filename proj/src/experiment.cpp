#include <specprune/experiment.hpp>

#include <specprune/denoise.hpp>
#include <specprune/parallel.hpp>

#include <chrono>
#include <cstdio>
#include <map>

namespace specprune {

void ExperimentSpec::validate() const {
    if (n_pixels.empty() || n_endmembers.empty() || max_purity.empty() || snr_db.empty())
        throw Error(ErrorKind::InvalidArgument, "every sweep axis needs at least one value");
    if (trials_per_cell < 1)
        throw Error(ErrorKind::InvalidArgument, "trials_per_cell must be >= 1");
    if (algorithms.empty())
        throw Error(ErrorKind::InvalidArgument, "no algorithms requested");
}

namespace {

template <typename T>
std::vector<T> axis(const Json &doc, const char *key, std::vector<T> fallback) {
    if (!doc.contains(key))
        return fallback;
    const Json &v = doc.at(key);
    if (v.is_array())
        return v.get<std::vector<T>>();
    return {v.get<T>()};
}

std::string fmt(double v) {
    if (!std::isfinite(v))
        return std::isnan(v) ? "" : (v > 0 ? "inf" : "-inf");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string fmt_snr(const std::optional<double> &snr) { return snr ? fmt(*snr) : "none"; }

std::string join(const IndexSet &s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i)
        out += (i ? ";" : "") + std::to_string(s[i]);
    return out;
}

struct Cell {
    Index n_pixels;
    Index n_endmembers;
    double max_purity;
    std::optional<double> snr_db;
};

std::vector<Cell> cells_of(const ExperimentSpec &spec) {
    std::vector<Cell> cells;
    for (Index n : spec.n_pixels)
        for (Index p : spec.n_endmembers)
            for (double purity : spec.max_purity)
                for (const auto &snr : spec.snr_db)
                    cells.push_back({n, p, purity, snr});
    return cells;
}

double margin(const std::vector<double> &scores, const IndexSet &truth) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (truth.contains(static_cast<Index>(i)))
            lo = std::min(lo, scores[i]);
        else
            hi = std::max(hi, scores[i]);
    }
    return lo - hi;
}

} // namespace

ExperimentSpec load_experiment_spec(const fs::path &path) {
    const Json doc = read_json(path);
    ExperimentSpec spec;
    try {
        if (doc.contains("library")) {
            const Json &lib = doc.at("library");
            if (lib.is_string()) {
                fs::path p(lib.get<std::string>());
                spec.library = p.is_relative() ? path.parent_path() / p : p;
            } else {
                const Json &s = lib.at("synthetic");
                spec.synthetic_library.atoms = s.value("atoms", spec.synthetic_library.atoms);
                spec.synthetic_library.bands = s.value("bands", spec.synthetic_library.bands);
                spec.synthetic_library.max_coherence =
                    s.value("max_coherence", spec.synthetic_library.max_coherence);
                spec.synthetic_library.seed = s.value("seed", spec.synthetic_library.seed);
            }
        }
        spec.n_pixels = axis<Index>(doc, "n_pixels", spec.n_pixels);
        spec.n_endmembers = axis<Index>(doc, "n_endmembers", spec.n_endmembers);
        spec.max_purity = axis<double>(doc, "max_purity", spec.max_purity);
        if (doc.contains("snr_db")) {
            spec.snr_db.clear();
            const Json &v = doc.at("snr_db");
            for (const Json &e : v.is_array() ? v : Json::array({v}))
                spec.snr_db.push_back(e.is_null() ? std::nullopt
                                                  : std::optional<double>(e.get<double>()));
        }
        spec.trials_per_cell = doc.value("trials_per_cell", spec.trials_per_cell);
        spec.base_seed = doc.value("base_seed", spec.base_seed);
        if (doc.contains("algorithms")) {
            spec.algorithms.clear();
            for (const auto &a : doc.at("algorithms"))
                spec.algorithms.push_back(parse_algorithm(a.get<std::string>()));
        }
        if (doc.contains("solver")) {
            const Json &s = doc.at("solver");
            auto opt_d = [&](const char *k) {
                return s.contains(k) ? std::optional<double>(s.at(k).get<double>()) : std::nullopt;
            };
            spec.solver.lambda = opt_d("lambda");
            spec.solver.rho = opt_d("rho");
            spec.solver.tol = opt_d("tol");
            if (s.contains("max_iter"))
                spec.solver.max_iter = s.at("max_iter").get<int>();
            if (s.contains("nonneg"))
                spec.solver.nonneg = s.at("nonneg").get<bool>();
            if (s.contains("sum_to_one"))
                spec.solver.sum_to_one = s.at("sum_to_one").get<bool>();
        }
        spec.denoise = doc.value("denoise", spec.denoise);
        spec.residual_tol = doc.value("residual_tol", spec.residual_tol);
    } catch (const Json::exception &e) {
        throw Error(ErrorKind::HeaderParse, path.string() + ": " + e.what());
    }
    spec.validate();
    return spec;
}

SpectralLibrary experiment_library(const ExperimentSpec &spec) {
    if (spec.library)
        return load_library(*spec.library);
    const auto &s = spec.synthetic_library;
    return generate_library(s.atoms, s.bands, s.max_coherence, s.seed);
}

std::vector<ExperimentRow> run_experiment(const ExperimentSpec &spec, const SpectralLibrary &lib,
                                          std::size_t threads) {
    spec.validate();
    lib.check_atoms();
    const std::vector<Cell> cells = cells_of(spec);
    const std::size_t trials = static_cast<std::size_t>(spec.trials_per_cell);
    const std::size_t algos = spec.algorithms.size();
    std::vector<ExperimentRow> rows(cells.size() * trials * algos);
    const SolverConfig prune_cfg = spec.solver.apply(pruning_solver_defaults());
    const SolverConfig unmix_cfg = unmixing_solver_defaults();

    parallel_for(cells.size() * trials, threads == 0 ? default_threads() : threads,
                 [&](std::size_t scene_index) {
        const std::size_t c = scene_index / trials;
        const Cell &cell = cells[c];
        SceneSpec scene_spec;
        scene_spec.n_pixels = cell.n_pixels;
        scene_spec.n_endmembers = cell.n_endmembers;
        scene_spec.max_purity = cell.max_purity;
        scene_spec.snr_db = cell.snr_db;
        scene_spec.seed = spec.base_seed + scene_index;
        const SceneTruth scene = generate_scene(lib, scene_spec);
        const std::size_t p = static_cast<std::size_t>(cell.n_endmembers);

        const auto denoise_start = std::chrono::steady_clock::now();
        const HsiCube working = spec.denoise ? denoise(scene.noisy_cube) : scene.noisy_cube;
        const auto denoise_time = std::chrono::steady_clock::now() - denoise_start;

        for (std::size_t a = 0; a < algos; ++a) {
            const auto start = std::chrono::steady_clock::now();
            ExperimentRow &row = rows[scene_index * algos + a];
            row.cell = c;
            row.trial = static_cast<int>(scene_index % trials);
            row.algorithm = spec.algorithms[a];
            row.n_pixels = cell.n_pixels;
            row.n_endmembers = cell.n_endmembers;
            row.max_purity = cell.max_purity;
            row.snr_db = cell.snr_db;
            row.seed = scene_spec.seed;
            row.truth = scene.indices;

            PruneResult result;
            if (row.algorithm == Algorithm::kNnd) {
                PruneOptions opts;
                opts.threads = 1;
                result = prune_nnd(working, lib, p, prune_cfg, opts);
                row.delta_margin = margin(result.scores, scene.indices);
                row.detected_min_order =
                    select_top(result.scores, p, ScoreOrder::kMinimize).includes(scene.indices);
            } else {
                result = omp_prune(working, lib, p, spec.residual_tol);
                row.delta_margin = std::numeric_limits<double>::quiet_NaN();
                row.detected_min_order = false;
            }
            row.selected = result.selected;
            const EvalReport e = evaluate_selection(lib, scene.indices, scene.clean_cube, working,
                                                    result.selected, unmix_cfg);
            row.detected = e.detection == 1.0;
            row.sre_db = e.sre_db;
            row.asad = e.asad;
            row.wall_ms = std::chrono::duration<double, std::milli>(
                              std::chrono::steady_clock::now() - start + denoise_time)
                              .count();
        }
    });
    return rows;
}

std::vector<CellSummary> summarize(const std::vector<ExperimentRow> &rows) {
    std::map<std::pair<std::size_t, Algorithm>, CellSummary> acc;
    for (const auto &r : rows) {
        CellSummary &s = acc[{r.cell, r.algorithm}];
        s.cell = r.cell;
        s.algorithm = r.algorithm;
        s.n_pixels = r.n_pixels;
        s.n_endmembers = r.n_endmembers;
        s.max_purity = r.max_purity;
        s.snr_db = r.snr_db;
        s.trials += 1;
        s.detection_probability += r.detected ? 1.0 : 0.0;
        s.detection_probability_min_order += r.detected_min_order ? 1.0 : 0.0;
        s.mean_sre_db += r.sre_db;
        s.mean_asad += r.asad;
    }
    std::vector<CellSummary> out;
    for (auto &[key, s] : acc) {
        const double n = static_cast<double>(s.trials);
        s.detection_probability /= n;
        s.detection_probability_min_order /= n;
        s.mean_sre_db /= n;
        s.mean_asad /= n;
        out.push_back(s);
    }
    return out;
}

std::string rows_to_csv(const std::vector<ExperimentRow> &rows, bool timing) {
    std::string out = "cell,trial,algorithm,n_pixels,n_endmembers,max_purity,snr_db,seed,"
                      "delta_margin,detected,detected_min_order,truth,selected,sre_db,asad";
    out += timing ? ",wall_ms\n" : "\n";
    for (const auto &r : rows) {
        out += std::to_string(r.cell) + "," + std::to_string(r.trial) + "," +
               to_string(r.algorithm) + "," + std::to_string(r.n_pixels) + "," +
               std::to_string(r.n_endmembers) + "," + fmt(r.max_purity) + "," +
               fmt_snr(r.snr_db) + "," + std::to_string(r.seed) + "," + fmt(r.delta_margin) +
               "," + (r.detected ? "1" : "0") + "," + (r.detected_min_order ? "1" : "0") + "," +
               join(r.truth) + "," + join(r.selected) + "," + fmt(r.sre_db) + "," + fmt(r.asad);
        out += timing ? "," + fmt(r.wall_ms) + "\n" : "\n";
    }
    return out;
}

std::string summary_to_csv(const std::vector<CellSummary> &cells) {
    std::string out = "cell,algorithm,n_pixels,n_endmembers,max_purity,snr_db,trials,"
                      "detection_probability,detection_probability_min_order,mean_sre_db,"
                      "mean_asad\n";
    for (const auto &s : cells)
        out += std::to_string(s.cell) + "," + to_string(s.algorithm) + "," +
               std::to_string(s.n_pixels) + "," + std::to_string(s.n_endmembers) + "," +
               fmt(s.max_purity) + "," + fmt_snr(s.snr_db) + "," + std::to_string(s.trials) +
               "," + fmt(s.detection_probability) + "," +
               fmt(s.detection_probability_min_order) + "," + fmt(s.mean_sre_db) + "," +
               fmt(s.mean_asad) + "\n";
    return out;
}

std::vector<ExperimentRow> cmd_experiment(const fs::path &spec_path, const fs::path &out,
                                          bool timing, std::size_t threads) {
    const ExperimentSpec spec = load_experiment_spec(spec_path);
    const SpectralLibrary lib = experiment_library(spec);
    std::vector<ExperimentRow> rows = run_experiment(spec, lib, threads);
    write_text(out, rows_to_csv(rows, timing));
    fs::path summary = out;
    summary.replace_extension(".summary.csv");
    write_text(summary, summary_to_csv(summarize(rows)));
    return rows;
}

} // namespace specprune
