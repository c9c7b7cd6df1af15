#pragma once

#include <specprune/core.hpp>

#include <cmath>
#include <optional>
#include <vector>

namespace specprune {

/// Proximal operator of tau*|.|: sign(v) * max(|v| - tau, 0).
template <typename Scalar>
Scalar soft_threshold(Scalar v, Scalar tau) {
    const Scalar mag = std::abs(v) - tau;
    return mag > Scalar(0) ? std::copysign(mag, v) : Scalar(0);
}

/// Elementwise soft threshold of a dense expression.
template <typename Derived>
auto soft_threshold(const Eigen::MatrixBase<Derived> &v, typename Derived::Scalar tau) {
    using Scalar = typename Derived::Scalar;
    return v.unaryExpr([tau](Scalar x) { return soft_threshold(x, tau); });
}

/// Settings for the L1-regularised inversion min_M ||X - M D||_F^2 + lambda ||M||_1.
///
/// Unset `lambda` resolves to default_lambda() of the data being solved and
/// unset `rho` to default_rho() of the library.
struct SolverConfig {
    std::optional<double> lambda;
    std::optional<double> rho;
    int max_iter = 1000;
    double tol_primal = 1e-6;
    double tol_dual = 1e-6;
    bool nonneg = false;
    bool sum_to_one = false;
    std::optional<AbundanceMatrix> warm_start;

    ConstraintMode constraints() const { return {nonneg, sum_to_one}; }
    /// Throws InvalidArgument on a negative lambda, nonpositive rho or
    /// tolerances, or max_iter < 1.
    void validate() const;
};

struct SolveDiagnostics {
    int iterations = 0;
    double final_primal_residual = 0.0;
    double final_dual_residual = 0.0;
    bool converged = false;
    double lambda = 0.0;
    double rho = 0.0;
    /// Objective at every Z iterate; one entry per iteration.
    std::vector<double> objective_trace;
};

struct SolveResult {
    AbundanceMatrix abundances;
    SolveDiagnostics diagnostics;
};

/// 1e-3 * max |X D^T|, the data-scaled sparsity weight.
double default_lambda(const HsiCube &cube, const SpectralLibrary &lib);

/// 0.1 * mean squared atom norm.
double default_rho(const SpectralLibrary &lib);

/// ||X - M D||_F^2 + lambda * ||M||_1.
double lasso_objective(const Matrix &x, const Matrix &m, const Matrix &d, double lambda);

/// ADMM solver for the sparse inversion with optional nonnegativity and
/// sum-to-one constraints.
///
/// Splits M = Z with scaled dual U and penalty rho * ||M - Z + U||_F^2:
///   M <- (X D^T + rho (Z - U)) (D D^T + rho I)^-1   [+ exact row-sum projection]
///   Z <- soft_threshold(M + U, lambda / (2 rho))     [clamped at 0 if nonneg]
///   U <- U + M - Z
/// The K x K system is factorised once. Convergence requires both
/// ||M - Z||_F and rho ||Z - Z_prev||_F, divided by sqrt(N K), below their
/// tolerances; otherwise the last iterate is returned with converged = false.
///
/// The returned matrix is Z, except with sum_to_one: rows are projected onto
/// the simplex when nonneg is also set, and the M iterate (exact row sums) is
/// returned when it is not.
SolveResult sunsal(const HsiCube &cube, const SpectralLibrary &lib, const SolverConfig &cfg);

} // namespace specprune
