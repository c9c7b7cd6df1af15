#include <specprune/pruning.hpp>

#include <specprune/parallel.hpp>

#include <algorithm>
#include <numeric>

namespace specprune {

double mutual_coherence(const SpectralLibrary &lib) {
    return mutual_coherence(lib.data());
}

IndexSet select_top(const std::vector<double> &scores, std::size_t p, ScoreOrder order) {
    std::vector<Index> idx(scores.size());
    std::iota(idx.begin(), idx.end(), Index{0});
    auto key = [&](Index i) { return scores[static_cast<std::size_t>(i)]; };
    std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) {
        const double sa = key(a), sb = key(b);
        if (std::isnan(sa) || std::isnan(sb))
            return !std::isnan(sa) && std::isnan(sb);
        return order == ScoreOrder::kMaximize ? sa > sb : sa < sb;
    });
    idx.resize(std::min(p, idx.size()));
    return IndexSet(std::move(idx));
}

namespace {

void check_p(std::size_t p, Index k) {
    if (p < 1 || static_cast<Index>(p) > k)
        throw Error(ErrorKind::InvalidP,
                    "p = " + std::to_string(p) + " outside [1, " + std::to_string(k) + "]");
}

} // namespace

PruneResult prune_nnd(const HsiCube &cube, const SpectralLibrary &lib, std::size_t p,
                      const SolverConfig &cfg, const PruneOptions &opts) {
    validate_pair(cube, lib);
    check_p(p, lib.atoms());

    SolverConfig shared = cfg;
    if (!shared.lambda)
        shared.lambda = default_lambda(cube, lib);
    if (!shared.rho)
        shared.rho = default_rho(lib);

    SolveResult base = sunsal(cube, lib, shared);
    const Matrix &m = base.abundances.data();
    const double base_norm = nuclear_norm(m);

    const std::size_t k = static_cast<std::size_t>(lib.atoms());
    std::vector<double> scores(k);
    std::vector<AtomSolveSummary> per_atom(k);
    const std::size_t threads = opts.threads == 0 ? default_threads() : opts.threads;

    parallel_for(k, threads, [&](std::size_t i) {
        const Index atom = static_cast<Index>(i);
        Matrix appended(m.rows() + 1, m.cols());
        SolveResult sol = [&] {
            if (opts.append == AppendStrategy::kRowSeparable) {
                SolverConfig row_cfg = shared;
                row_cfg.warm_start.reset();
                return sunsal(HsiCube(Matrix(lib.data().row(atom))), lib, row_cfg);
            }
            Matrix y(cube.pixels() + 1, cube.bands());
            y << cube.data(), lib.data().row(atom);
            Matrix warm = Matrix::Zero(m.rows() + 1, m.cols());
            warm.topRows(m.rows()) = m;
            SolverConfig full_cfg = shared;
            full_cfg.warm_start = AbundanceMatrix(std::move(warm), shared.constraints());
            return sunsal(HsiCube(std::move(y)), lib, full_cfg);
        }();
        if (opts.append == AppendStrategy::kRowSeparable)
            appended << m, sol.abundances.data();
        else
            appended = sol.abundances.data();
        scores[i] = base_norm - nuclear_norm(appended);
        per_atom[i] = {sol.diagnostics.iterations, sol.diagnostics.converged};
    });

    PruneResult result;
    result.selected = select_top(scores, p, opts.order);
    result.scores = std::move(scores);
    result.base_nuclear_norm = base_norm;
    result.per_atom = std::move(per_atom);
    result.base_diagnostics = std::move(base.diagnostics);
    return result;
}

PruneResult omp_prune(const HsiCube &cube, const SpectralLibrary &lib, std::size_t p,
                      double residual_tol) {
    validate_pair(cube, lib);
    check_p(p, lib.atoms());

    const Matrix &x = cube.data();
    const Index k = lib.atoms();
    const Matrix unit = lib.data().rowwise().normalized();
    const double x_norm = x.norm();

    std::vector<Index> chosen;
    Matrix residual = x;
    double rel = x_norm > 0.0 ? 1.0 : 0.0;

    while (chosen.size() < p && rel > residual_tol) {
        const Vector corr = (residual * unit.transpose()).colwise().norm().transpose();
        Index best = -1;
        for (Index i = 0; i < k; ++i) {
            if (std::find(chosen.begin(), chosen.end(), i) != chosen.end())
                continue;
            if (best < 0 || corr(i) > corr(best))
                best = i;
        }
        chosen.push_back(best);

        Matrix sub(static_cast<Index>(chosen.size()), x.cols());
        for (std::size_t j = 0; j < chosen.size(); ++j)
            sub.row(static_cast<Index>(j)) = lib.data().row(chosen[j]);
        // Least squares X ~ A sub, solved as sub^T A^T = X^T.
        const Matrix coeffs =
            sub.transpose().colPivHouseholderQr().solve(x.transpose()).transpose();
        Matrix next = x - coeffs * sub;
        const double next_rel = next.norm() / x_norm;
        if (rel - next_rel < 1e-6 * rel) {
            chosen.pop_back();
            break;
        }
        residual = std::move(next);
        rel = next_rel;
    }

    PruneResult result;
    result.scores.assign(static_cast<std::size_t>(k), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t r = 0; r < chosen.size(); ++r)
        result.scores[static_cast<std::size_t>(chosen[r])] =
            static_cast<double>(k) - static_cast<double>(r);
    result.selected = IndexSet(std::move(chosen));
    return result;
}

} // namespace specprune
