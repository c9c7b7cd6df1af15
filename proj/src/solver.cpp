#include <specprune/solver.hpp>

#include <algorithm>
#include <functional>
#include <string>

namespace specprune {

namespace {

constexpr double kDivergenceBound = 1e12;

// Euclidean projection of each row onto the probability simplex.
void project_rows_to_simplex(Matrix &m) {
    const Index k = m.cols();
    std::vector<double> sorted(static_cast<std::size_t>(k));
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < k; ++c)
            sorted[static_cast<std::size_t>(c)] = m(r, c);
        std::sort(sorted.begin(), sorted.end(), std::greater<>());
        double cumulative = 0.0;
        double theta = 0.0;
        for (Index j = 0; j < k; ++j) {
            cumulative += sorted[static_cast<std::size_t>(j)];
            const double t = (cumulative - 1.0) / static_cast<double>(j + 1);
            if (sorted[static_cast<std::size_t>(j)] - t > 0.0)
                theta = t;
        }
        m.row(r) = (m.row(r).array() - theta).cwiseMax(0.0);
    }
}

} // namespace

void SolverConfig::validate() const {
    if (lambda && !(*lambda >= 0.0 && std::isfinite(*lambda)))
        throw Error(ErrorKind::InvalidArgument, "lambda must be finite and >= 0");
    if (rho && !(*rho > 0.0 && std::isfinite(*rho)))
        throw Error(ErrorKind::InvalidArgument, "rho must be finite and > 0");
    if (max_iter < 1)
        throw Error(ErrorKind::InvalidArgument, "max_iter must be >= 1");
    if (!(tol_primal > 0.0) || !(tol_dual > 0.0))
        throw Error(ErrorKind::InvalidArgument, "tolerances must be > 0");
}

double default_lambda(const HsiCube &cube, const SpectralLibrary &lib) {
    if (cube.bands() != lib.bands())
        throw Error(ErrorKind::DimensionMismatch, "cube/library band count");
    return 1e-3 * (cube.data() * lib.data().transpose()).cwiseAbs().maxCoeff();
}

double default_rho(const SpectralLibrary &lib) {
    return 0.1 * lib.data().squaredNorm() / static_cast<double>(lib.atoms());
}

double lasso_objective(const Matrix &x, const Matrix &m, const Matrix &d, double lambda) {
    return (x - m * d).squaredNorm() + lambda * m.cwiseAbs().sum();
}

SolveResult sunsal(const HsiCube &cube, const SpectralLibrary &lib, const SolverConfig &cfg) {
    validate_pair(cube, lib);
    cfg.validate();

    const Matrix &x = cube.data();
    const Matrix &d = lib.data();
    const Index n = x.rows();
    const Index k = d.rows();
    const double lambda = cfg.lambda ? *cfg.lambda : default_lambda(cube, lib);
    const double rho = cfg.rho ? *cfg.rho : default_rho(lib);
    const double tau = lambda / (2.0 * rho);
    const double scale = std::sqrt(static_cast<double>(n * k));

    const Matrix gram = d * d.transpose();
    const Eigen::LLT<Matrix> llt(gram + rho * Matrix::Identity(k, k));
    if (llt.info() != Eigen::Success)
        throw Error(ErrorKind::NonFiniteIterate, "ridge system factorisation failed");
    const Matrix system_inv = llt.solve(Matrix::Identity(k, k));
    const Matrix xdt = x * d.transpose();
    const double x_energy = x.squaredNorm();

    // Sum-to-one: M = W - ((W 1 - 1) / s) c^T with c = A^-1 1, s = 1^T c.
    const Vector ones_solved = system_inv * Vector::Ones(k);
    const double ones_weight = ones_solved.sum();

    Matrix z = Matrix::Zero(n, k);
    if (cfg.warm_start) {
        const Matrix &w = cfg.warm_start->data();
        if (w.rows() != n || w.cols() != k)
            throw Error(ErrorKind::DimensionMismatch, "warm start shape");
        z = w;
    }
    Matrix u = Matrix::Zero(n, k);
    Matrix m(n, k);
    Matrix z_prev(n, k);

    SolveDiagnostics diag;
    diag.lambda = lambda;
    diag.rho = rho;
    diag.objective_trace.reserve(static_cast<std::size_t>(cfg.max_iter));

    for (int it = 0; it < cfg.max_iter; ++it) {
        m.noalias() = (xdt + rho * (z - u)) * system_inv;
        if (cfg.sum_to_one) {
            const Vector excess = (m.rowwise().sum().array() - 1.0).matrix() / ones_weight;
            m.noalias() -= excess * ones_solved.transpose();
        }

        z_prev.swap(z);
        z = soft_threshold(m + u, tau);
        if (cfg.nonneg)
            z = z.cwiseMax(0.0);
        u += m - z;

        const double zmax = z.cwiseAbs().maxCoeff();
        if (!std::isfinite(zmax) || zmax > kDivergenceBound || !u.allFinite())
            throw Error(ErrorKind::NonFiniteIterate,
                        "iterate magnitude exceeded bound at iteration " +
                            std::to_string(it + 1));

        const double fit = x_energy - 2.0 * z.cwiseProduct(xdt).sum() +
                           (z * gram).cwiseProduct(z).sum();
        diag.objective_trace.push_back(std::max(fit, 0.0) + lambda * z.cwiseAbs().sum());

        diag.iterations = it + 1;
        diag.final_primal_residual = (m - z).norm() / scale;
        diag.final_dual_residual = rho * (z - z_prev).norm() / scale;
        if (diag.final_primal_residual < cfg.tol_primal &&
            diag.final_dual_residual < cfg.tol_dual) {
            diag.converged = true;
            break;
        }
    }

    Matrix out;
    if (cfg.sum_to_one && cfg.nonneg) {
        out = std::move(z);
        project_rows_to_simplex(out);
    } else if (cfg.sum_to_one) {
        out = std::move(m);
    } else {
        out = std::move(z);
    }
    return {AbundanceMatrix(std::move(out), cfg.constraints()), std::move(diag)};
}

} // namespace specprune
