#include <specprune/commands.hpp>

#include <specprune/denoise.hpp>
#include <specprune/plot.hpp>

#include <numbers>

namespace specprune {

SolverConfig SolverOverrides::apply(SolverConfig base) const {
    if (lambda)
        base.lambda = *lambda;
    if (rho)
        base.rho = *rho;
    if (max_iter)
        base.max_iter = *max_iter;
    if (tol) {
        base.tol_primal = *tol;
        base.tol_dual = *tol;
    }
    if (nonneg)
        base.nonneg = *nonneg;
    if (sum_to_one)
        base.sum_to_one = *sum_to_one;
    base.validate();
    return base;
}

SolverConfig pruning_solver_defaults() {
    SolverConfig cfg;
    cfg.nonneg = true;
    return cfg;
}

SolverConfig unmixing_solver_defaults() {
    SolverConfig cfg;
    cfg.nonneg = true;
    cfg.sum_to_one = true;
    cfg.tol_primal = 1e-8;
    cfg.tol_dual = 1e-8;
    cfg.max_iter = 5000;
    return cfg;
}

Json config_to_json(const SolverConfig &cfg) {
    auto opt = [](const std::optional<double> &v) { return v ? Json(*v) : Json("auto"); };
    return {{"lambda", opt(cfg.lambda)},         {"rho", opt(cfg.rho)},
            {"max_iter", cfg.max_iter},          {"tol_primal", cfg.tol_primal},
            {"tol_dual", cfg.tol_dual},          {"nonneg", cfg.nonneg},
            {"sum_to_one", cfg.sum_to_one}};
}

std::string to_string(Algorithm a) { return a == Algorithm::kNnd ? "nnd" : "omp"; }

Algorithm parse_algorithm(const std::string &name) {
    if (name == "nnd")
        return Algorithm::kNnd;
    if (name == "omp")
        return Algorithm::kOmp;
    throw Error(ErrorKind::InvalidArgument, "unknown algorithm '" + name + "'");
}

SpectralLibrary cmd_library(const LibraryArgs &args) {
    SpectralLibrary lib = generate_library(args.atoms, args.bands, args.max_coherence, args.seed);
    save_library(lib, args.out);
    return lib;
}

SynthOutput cmd_synth(const SynthArgs &args) {
    const SpectralLibrary lib = load_library(args.library);
    SceneSpec spec;
    spec.n_pixels = args.pixels;
    spec.n_endmembers = args.endmembers;
    spec.max_purity = args.purity;
    spec.snr_db = args.snr_db;
    spec.seed = args.seed;
    SceneTruth scene = generate_scene(lib, spec);

    std::error_code ec;
    fs::create_directories(args.out_dir, ec);
    if (ec)
        throw Error(ErrorKind::IoFailure, "cannot create " + args.out_dir.string());
    SynthOutput out{args.out_dir / "scene.json", args.out_dir / "truth.json", std::move(scene)};
    save_cube(out.scene.noisy_cube, out.cube);

    TruthRecord truth;
    truth.spec = spec;
    truth.indices = out.scene.indices;
    for (Index i : out.scene.indices)
        truth.names.push_back(lib.names()[static_cast<std::size_t>(i)]);
    truth.abundances = out.scene.abundances.data();
    truth.library = args.library.string();
    truth.cube = out.cube.filename().string();
    save_truth(truth, out.truth);
    return out;
}

UnmixOutcome unmix_selection(const HsiCube &cube, const SpectralLibrary &lib,
                             const IndexSet &indices, const SolverConfig &cfg,
                             const HsiCube *reference) {
    if (indices.empty())
        throw Error(ErrorKind::InvalidArgument, "no atoms selected for unmixing");
    SolverConfig shared = cfg;
    if (!shared.lambda)
        shared.lambda = default_lambda(cube, lib);
    const SpectralLibrary pruned = lib.subset(indices);
    SolveResult sol = sunsal(cube, pruned, shared);
    const HsiCube recon = reconstruct(pruned, sol.abundances);
    const double sre_value = sre(reference ? *reference : cube, recon);
    return {std::move(sol.abundances), std::move(sol.diagnostics), sre_value};
}

namespace {

fs::path resolve_beside(const std::string &stored, const fs::path &anchor) {
    fs::path p(stored);
    if (p.is_relative() && !fs::exists(p))
        return anchor.parent_path() / p;
    return p;
}

Json eval_metrics_record(const EvalReport &e) {
    return {{"asad", e.asad},
            {"sre", std::isinf(e.sre_db) ? Json(nullptr) : Json(e.sre_db)},
            {"sre_exact", std::isinf(e.sre_db)},
            {"detection", e.detection},
            {"per_endmember_sad", e.per_endmember_sad}};
}

} // namespace

PruneOutput cmd_prune(const PruneArgs &args) {
    const HsiCube input = load_cube(args.cube);
    const SpectralLibrary lib = load_library(args.library);
    validate_pair(input, lib);
    if (args.p < 1 || static_cast<Index>(args.p) > lib.atoms())
        throw Error(ErrorKind::InvalidP, "--p must be in [1, " + std::to_string(lib.atoms()) + "]");

    PruneOutput out;
    std::vector<std::string> notes;
    HsiCube working = input;
    if (args.denoise) {
        working = denoise(input, args.ridge, &out.warnings);
        notes.emplace_back("denoise: per-band regression residual subtracted from each band");
    }

    const SolverConfig cfg = args.solver.apply(pruning_solver_defaults());
    PruneResult result;
    if (args.algorithm == Algorithm::kNnd) {
        PruneOptions opts;
        opts.order = args.order;
        opts.threads = args.threads;
        result = prune_nnd(working, lib, args.p, cfg, opts);
        if (!result.base_diagnostics.converged)
            out.warnings.emplace_back("base solve did not converge in " +
                                      std::to_string(result.base_diagnostics.iterations) +
                                      " iterations");
    } else {
        result = omp_prune(working, lib, args.p, args.residual_tol);
    }

    Report &report = out.report;
    report.algorithm = to_string(args.algorithm);
    for (Index i : result.selected)
        report.selected_names.push_back(lib.names()[static_cast<std::size_t>(i)]);
    report.config = {{"solver", config_to_json(cfg)},
                     {"p", args.p},
                     {"denoise", args.denoise},
                     {"ridge", args.ridge ? Json(*args.ridge) : Json("min-norm")},
                     {"score_order", args.order == ScoreOrder::kMaximize ? "max" : "min"},
                     {"residual_tol", args.residual_tol}};
    if (args.algorithm == Algorithm::kNnd)
        report.config["solver"]["lambda"] = result.base_diagnostics.lambda;

    std::optional<TruthRecord> truth;
    if (args.truth) {
        truth = load_truth(*args.truth);
        report.seed = truth->spec.seed;
        truth->indices.check_bound(lib.atoms());
    }
    if (!result.selected.empty()) {
        const SolverConfig unmix_cfg = unmixing_solver_defaults();
        if (truth) {
            const HsiCube clean = clean_cube_from_truth(*truth, lib);
            const EvalReport e =
                evaluate_selection(lib, truth->indices, clean, working, result.selected, unmix_cfg);
            report.metrics = {e.asad, e.sre_db, e.detection, "clean"};
        } else {
            report.metrics.sre_db =
                unmix_selection(working, lib, result.selected, unmix_cfg, &input).sre_db;
        }
    } else if (truth) {
        report.metrics.detection = truth->indices.empty() ? 1.0 : 0.0;
    }
    report.notes = std::move(notes);
    report.result = std::move(result);
    save_report(report, args.out);

    if (args.plot) {
        const IndexSet marks = truth ? truth->indices : IndexSet{};
        write_text(*args.plot, score_plot_svg(report.result.scores, marks,
                                              report.algorithm + " score per library atom"));
    }
    return out;
}

HsiCube clean_cube_from_truth(const TruthRecord &truth, const SpectralLibrary &lib) {
    truth.indices.check_bound(lib.atoms());
    const Matrix clean = truth.abundances * lib.subset(truth.indices).data();
    return HsiCube(clean, lib.wavelengths());
}

UnmixOutcome cmd_unmix(const UnmixArgs &args) {
    if (args.indices.empty())
        throw Error(ErrorKind::InvalidArgument, "--indices must name at least one atom");
    const HsiCube cube = load_cube(args.cube);
    const SpectralLibrary lib = load_library(args.library);
    validate_pair(cube, lib);
    args.indices.check_bound(lib.atoms());

    std::optional<HsiCube> reference;
    if (args.reference)
        reference = load_cube(*args.reference);
    else if (args.truth)
        reference = clean_cube_from_truth(load_truth(*args.truth), lib);
    if (reference && (reference->pixels() != cube.pixels() || reference->bands() != cube.bands()))
        throw Error(ErrorKind::DimensionMismatch, "reference cube shape differs from input");

    const SolverConfig cfg = args.solver.apply(unmixing_solver_defaults());
    UnmixOutcome outcome =
        unmix_selection(cube, lib, args.indices, cfg, reference ? &*reference : nullptr);
    if (args.out)
        save_abundances_csv(outcome.abundances, lib.subset(args.indices).names(), *args.out);
    return outcome;
}

EvalReport evaluate_selection(const SpectralLibrary &lib, const IndexSet &truth,
                              const HsiCube &clean, const HsiCube &cube,
                              const IndexSet &selected, const SolverConfig &unmix_cfg) {
    EvalReport e;
    e.detection = selected.includes(truth) ? 1.0 : 0.0;
    if (selected.empty()) {
        e.per_endmember_sad.assign(truth.size(), std::numbers::pi / 2);
        e.asad = std::numbers::pi / 2;
        e.sre_db = 0.0;
        return e;
    }
    const AsadResult a = asad(lib.subset(truth), lib.subset(selected));
    e.asad = a.value;
    e.per_endmember_sad = a.per_true_sad;
    e.sre_db = unmix_selection(cube, lib, selected, unmix_cfg, &clean).sre_db;
    return e;
}

Json eval_to_json(const EvalReport &eval) {
    Json j = eval_metrics_record(eval);
    j["schema"] = 1;
    return j;
}

EvalReport cmd_eval(const EvalArgs &args) {
    const TruthRecord truth = load_truth(args.truth);
    const ReportSummary report = load_report(args.report);
    const SpectralLibrary lib =
        load_library(args.library ? *args.library : resolve_beside(truth.library, args.truth));
    fs::path cube_path = args.cube ? *args.cube : fs::path(truth.cube);
    if (!args.cube && cube_path.is_relative())
        cube_path = args.truth.parent_path() / cube_path;
    const HsiCube cube = load_cube(cube_path);
    validate_pair(cube, lib);
    report.selected.check_bound(lib.atoms());
    const HsiCube clean = clean_cube_from_truth(truth, lib);
    EvalReport e = evaluate_selection(lib, truth.indices, clean, cube, report.selected,
                                      unmixing_solver_defaults());
    if (args.out)
        write_text(*args.out, dump_json(eval_to_json(e), 12));
    return e;
}

} // namespace specprune
