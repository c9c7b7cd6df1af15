#pragma once

#include <specprune/core.hpp>
#include <specprune/solver.hpp>

#include <Eigen/Eigenvalues>

#include <cstddef>
#include <limits>
#include <vector>

namespace specprune {

/// Sum of singular values, via the eigenvalues of the smaller Gram matrix.
///
/// Eigenvalues below size * eps * max eigenvalue (including negative
/// round-off) are clamped to zero before the square root, so rank-deficient
/// inputs do not pick up sqrt(eps)-sized phantom singular values.
template <typename Derived>
typename Derived::RealScalar nuclear_norm(const Eigen::MatrixBase<Derived> &m) {
    using Scalar = typename Derived::Scalar;
    using Real = typename Derived::RealScalar;
    using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    if (!m.allFinite())
        throw Error(ErrorKind::NonFiniteData, "nuclear_norm input");
    if (m.size() == 0)
        return Real(0);
    const Dense gram = m.cols() <= m.rows() ? Dense(m.adjoint() * m) : Dense(m * m.adjoint());
    const Eigen::SelfAdjointEigenSolver<Dense> eig(gram, Eigen::EigenvaluesOnly);
    const auto &values = eig.eigenvalues();
    const Real cutoff = static_cast<Real>(values.size()) *
                        std::numeric_limits<Real>::epsilon() *
                        std::max(values.maxCoeff(), Real(0));
    Real sum = 0;
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (values(i) > cutoff)
            sum += std::sqrt(values(i));
    return sum;
}

/// Largest absolute cosine between two distinct rows.
template <typename Derived>
typename Derived::Scalar mutual_coherence(const Eigen::MatrixBase<Derived> &atoms) {
    using Scalar = typename Derived::Scalar;
    using Dense = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    if (atoms.rows() < 2)
        throw Error(ErrorKind::InvalidArgument, "coherence needs at least two atoms");
    const auto norms = atoms.rowwise().norm().eval();
    for (Eigen::Index i = 0; i < norms.size(); ++i)
        if (!(norms(i) > Scalar(0)))
            throw Error(ErrorKind::ZeroNormAtom, "atom " + std::to_string(i));
    const Dense unit = norms.cwiseInverse().asDiagonal() * atoms;
    Dense cosines = (unit * unit.transpose()).cwiseAbs();
    cosines.diagonal().setZero();
    return std::min(cosines.maxCoeff(), Scalar(1));
}

double mutual_coherence(const SpectralLibrary &lib);

enum class ScoreOrder { kMaximize, kMinimize };

/// How the K per-atom solves treat the appended pixel.
enum class AppendStrategy {
    /// The objective separates over pixel rows, so the solution of [X; d_i]
    /// is [M; solve(d_i)]. Only the appended row is solved.
    kRowSeparable,
    /// Re-solve the full (N+1)-pixel problem warm-started from [M; 0].
    kFullResolve,
};

struct PruneOptions {
    ScoreOrder order = ScoreOrder::kMaximize;
    AppendStrategy append = AppendStrategy::kRowSeparable;
    /// 0 means default_threads().
    std::size_t threads = 0;
};

struct AtomSolveSummary {
    int iterations = 0;
    bool converged = false;
};

struct PruneResult {
    /// One score per library atom. nnd: delta_i = ||M||_* - ||M_i||_*.
    /// omp: K - rank for selected atoms, NaN for the rest.
    std::vector<double> scores;
    IndexSet selected;
    double base_nuclear_norm = std::numeric_limits<double>::quiet_NaN();
    std::vector<AtomSolveSummary> per_atom;
    SolveDiagnostics base_diagnostics;
};

/// Indices of the p best scores (descending for kMaximize, ascending for
/// kMinimize), ties to the lower index. NaN scores rank last.
IndexSet select_top(const std::vector<double> &scores, std::size_t p, ScoreOrder order);

/// Dictionary pruning by nuclear-norm difference.
///
/// Solves the base abundances M of the cube against the full library, then
/// for every atom appends it as an extra pixel, re-solves, and scores the
/// drop in nuclear norm. The lambda resolved for the base solve is shared by
/// every append solve.
PruneResult prune_nnd(const HsiCube &cube, const SpectralLibrary &lib, std::size_t p,
                      const SolverConfig &cfg, const PruneOptions &opts = {});

/// Greedy orthogonal matching pursuit over the residual matrix.
///
/// Each step picks the unselected atom with the largest ||R d_i^T||_2 over
/// unit-normalised atoms and refits the cube on all selected atoms by least
/// squares. Stops after p atoms, when ||R||_F / ||X||_F <= residual_tol, or
/// when an added atom lowers the relative residual by less than 1e-6 (that
/// atom is discarded).
PruneResult omp_prune(const HsiCube &cube, const SpectralLibrary &lib, std::size_t p,
                      double residual_tol = 1e-4);

} // namespace specprune
