#include <specprune/metrics.hpp>

#include <limits>

namespace specprune {

double sre(const HsiCube &x, const HsiCube &x_hat) {
    return sre_db(x.data(), x_hat.data());
}

AsadResult asad(const SpectralLibrary &true_lib, const SpectralLibrary &est_lib) {
    if (true_lib.bands() != est_lib.bands())
        throw Error(ErrorKind::DimensionMismatch, "asad libraries differ in band count");
    const Index nt = true_lib.atoms();
    const Index ne = est_lib.atoms();
    Matrix angles(nt, ne);
    for (Index i = 0; i < nt; ++i)
        for (Index j = 0; j < ne; ++j)
            angles(i, j) = sad(true_lib.data().row(i), est_lib.data().row(j));

    AsadResult result;
    result.per_true_sad.assign(static_cast<std::size_t>(nt), std::numbers::pi / 2);
    std::vector<bool> used_true(static_cast<std::size_t>(nt), false);
    std::vector<bool> used_est(static_cast<std::size_t>(ne), false);
    const Index pairs = std::min(nt, ne);
    for (Index step = 0; step < pairs; ++step) {
        Index bi = -1, bj = -1;
        double best = std::numeric_limits<double>::infinity();
        for (Index i = 0; i < nt; ++i) {
            if (used_true[static_cast<std::size_t>(i)])
                continue;
            for (Index j = 0; j < ne; ++j)
                if (!used_est[static_cast<std::size_t>(j)] && angles(i, j) < best) {
                    best = angles(i, j);
                    bi = i;
                    bj = j;
                }
        }
        used_true[static_cast<std::size_t>(bi)] = true;
        used_est[static_cast<std::size_t>(bj)] = true;
        result.matching.emplace_back(bi, bj);
        result.per_true_sad[static_cast<std::size_t>(bi)] = best;
    }
    double total = 0.0;
    for (double a : result.per_true_sad)
        total += a;
    result.value = total / static_cast<double>(nt);
    return result;
}

double detection_probability(const std::vector<IndexSet> &true_sets,
                             const std::vector<IndexSet> &est_sets) {
    if (true_sets.empty())
        throw Error(ErrorKind::EmptyTrials, "no trials");
    if (true_sets.size() != est_sets.size())
        throw Error(ErrorKind::DimensionMismatch, "trial counts differ");
    std::size_t hits = 0;
    for (std::size_t t = 0; t < true_sets.size(); ++t)
        if (est_sets[t].includes(true_sets[t]))
            ++hits;
    return static_cast<double>(hits) / static_cast<double>(true_sets.size());
}

} // namespace specprune
