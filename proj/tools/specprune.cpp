#include <specprune/commands.hpp>
#include <specprune/experiment.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

using namespace specprune;

namespace {

void add_solver_flags(CLI::App *cmd, SolverOverrides &s) {
    cmd->add_option("--lambda", s.lambda, "Sparsity weight (default: data-scaled)");
    cmd->add_option("--rho", s.rho, "ADMM penalty (default: 0.1 * mean atom energy)");
    cmd->add_option("--max-iter", s.max_iter, "ADMM iteration cap");
    cmd->add_option("--tol", s.tol, "Primal and dual residual tolerance");
    cmd->add_option("--nonneg", s.nonneg, "Enforce nonnegative abundances (true/false)");
    cmd->add_option("--sum-to-one", s.sum_to_one, "Enforce unit row sums (true/false)");
}

std::vector<Index> parse_indices(const std::string &text) {
    std::vector<Index> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t next = text.find_first_of(",;", pos);
        const std::string item = text.substr(pos, next == std::string::npos ? next : next - pos);
        if (!item.empty()) {
            try {
                out.push_back(std::stol(item));
            } catch (const std::exception &) {
                throw Error(ErrorKind::InvalidArgument, "bad index '" + item + "'");
            }
        }
        if (next == std::string::npos)
            break;
        pos = next + 1;
    }
    return out;
}

void print_warnings(const std::vector<std::string> &warnings) {
    for (const auto &w : warnings)
        std::cerr << "warning: " << w << "\n";
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Hyperspectral dictionary pruning by nuclear-norm difference"};
    app.require_subcommand(1);

    LibraryArgs lib_args;
    auto *library = app.add_subcommand("library", "Generate a synthetic spectral library CSV");
    library->add_option("--atoms", lib_args.atoms, "Number of atoms")->capture_default_str();
    library->add_option("--bands", lib_args.bands, "Number of bands")->capture_default_str();
    library->add_option("--max-coherence", lib_args.max_coherence, "Coherence ceiling")
        ->capture_default_str();
    library->add_option("--seed", lib_args.seed, "Random seed")->capture_default_str();
    library->add_option("--out", lib_args.out, "Output CSV")->required();

    SynthArgs synth_args;
    auto *synth = app.add_subcommand("synth", "Generate a synthetic scene");
    synth->add_option("--lib", synth_args.library, "Library CSV")->required();
    synth->add_option("--pixels", synth_args.pixels, "Pixel count")->capture_default_str();
    synth->add_option("--endmembers", synth_args.endmembers, "Endmember count")
        ->capture_default_str();
    synth->add_option("--purity", synth_args.purity, "Maximum abundance per pixel")
        ->capture_default_str();
    synth->add_option("--snr", synth_args.snr_db, "Noise level in dB (omit for noiseless)");
    synth->add_option("--seed", synth_args.seed, "Random seed")->capture_default_str();
    synth->add_option("--out", synth_args.out_dir, "Output directory")->required();

    PruneArgs prune_args;
    std::string prune_algo = "nnd";
    std::string score_order = "max";
    bool no_denoise = false;
    auto *prune = app.add_subcommand("prune", "Select the pruned library for a cube");
    prune->add_option("--cube", prune_args.cube, "Cube header (.json)")->required();
    prune->add_option("--lib", prune_args.library, "Library CSV")->required();
    prune->add_option("--p", prune_args.p, "Number of atoms to select")->required();
    prune->add_option("--algo", prune_algo, "nnd or omp")->capture_default_str();
    prune->add_flag("--no-denoise", no_denoise, "Skip regression denoising");
    prune->add_option("--ridge", prune_args.ridge,
                      "Denoising ridge (default: minimum-norm least squares)");
    prune->add_option("--score-order", score_order, "max or min")->capture_default_str();
    prune->add_option("--residual-tol", prune_args.residual_tol, "OMP stopping residual")
        ->capture_default_str();
    prune->add_option("--truth", prune_args.truth, "Scene truth JSON for metrics");
    prune->add_option("--plot", prune_args.plot, "Write a score plot (SVG)");
    prune->add_option("--out", prune_args.out, "Report JSON")->required();
    add_solver_flags(prune, prune_args.solver);

    UnmixArgs unmix_args;
    std::string unmix_indices;
    auto *unmix = app.add_subcommand("unmix", "Invert a cube on a subset of the library");
    unmix->add_option("--cube", unmix_args.cube, "Cube header (.json)")->required();
    unmix->add_option("--lib", unmix_args.library, "Library CSV")->required();
    unmix->add_option("--indices", unmix_indices, "Comma-separated atom indices")->required();
    unmix->add_option("--reference", unmix_args.reference, "Cube to score SRE against");
    unmix->add_option("--truth", unmix_args.truth, "Score SRE against the scene's clean cube");
    unmix->add_option("--out", unmix_args.out, "Abundance CSV");
    add_solver_flags(unmix, unmix_args.solver);

    EvalArgs eval_args;
    auto *eval = app.add_subcommand("eval", "Score a pruning report against scene truth");
    eval->add_option("--truth", eval_args.truth, "Scene truth JSON")->required();
    eval->add_option("--report", eval_args.report, "Pruning report JSON")->required();
    eval->add_option("--lib", eval_args.library, "Library CSV (default: from truth)");
    eval->add_option("--cube", eval_args.cube, "Cube header (default: from truth)");
    eval->add_option("--out", eval_args.out, "Metrics JSON (default: stdout)");

    fs::path experiment_spec;
    fs::path experiment_out;
    bool no_timing = false;
    auto *experiment = app.add_subcommand("experiment", "Run a seeded sweep");
    experiment->add_option("--spec", experiment_spec, "Experiment JSON")->required();
    experiment->add_option("--out", experiment_out, "Per-trial CSV")->required();
    experiment->add_flag("--no-timing", no_timing, "Omit the wall-time column");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*library) {
            cmd_library(lib_args);
        } else if (*synth) {
            const SynthOutput out = cmd_synth(synth_args);
            std::cout << out.cube.string() << "\n" << out.truth.string() << "\n";
        } else if (*prune) {
            prune_args.algorithm = parse_algorithm(prune_algo);
            prune_args.denoise = !no_denoise;
            if (score_order != "max" && score_order != "min")
                throw Error(ErrorKind::InvalidArgument, "--score-order must be max or min");
            prune_args.order = score_order == "max" ? ScoreOrder::kMaximize : ScoreOrder::kMinimize;
            const PruneOutput out = cmd_prune(prune_args);
            print_warnings(out.warnings);
            std::string names;
            for (const auto &n : out.report.selected_names)
                names += (names.empty() ? "" : ", ") + n;
            std::cout << "selected: " << names << "\n";
        } else if (*unmix) {
            unmix_args.indices = IndexSet(parse_indices(unmix_indices));
            const UnmixOutcome out = cmd_unmix(unmix_args);
            if (std::isinf(out.sre_db))
                std::cout << "sre_db: exact\n";
            else
                std::printf("sre_db: %.6f\n", out.sre_db);
        } else if (*eval) {
            const EvalReport e = cmd_eval(eval_args);
            if (!eval_args.out)
                std::cout << dump_json(eval_to_json(e));
        } else if (*experiment) {
            cmd_experiment(experiment_spec, experiment_out, !no_timing);
        }
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
