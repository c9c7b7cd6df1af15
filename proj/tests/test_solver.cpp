#include <specprune/solver.hpp>

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace specprune;

namespace {

ErrorKind kind_of(auto &&fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::InvalidArgument;
}

struct Instance {
    Matrix x;
    Matrix d;
};

// Random positive mixtures of a Gaussian dictionary with a little noise.
Instance random_instance(Index n, Index k, Index l, std::uint64_t seed) {
    Instance in;
    in.d = oracle::gaussian(k, l, seed);
    const Matrix m = oracle::gaussian(n, k, seed + 1000).cwiseAbs();
    in.x = m * in.d + 0.05 * oracle::gaussian(n, l, seed + 2000);
    return in;
}

SolveResult solve(const Instance &in, SolverConfig cfg) {
    return sunsal(HsiCube(in.x), SpectralLibrary(in.d), cfg);
}

} // namespace

TEST_CASE("soft_threshold examples") {
    CHECK(soft_threshold(3.0, 1.0) == 2.0);
    CHECK(soft_threshold(-3.0, 1.0) == -2.0);
    CHECK(soft_threshold(0.5, 1.0) == 0.0);
    Matrix v(1, 3);
    v << 3.0, -3.0, 0.5;
    const Matrix t = soft_threshold(v, 1.0);
    CHECK(t(0, 0) == 2.0);
    CHECK(t(0, 1) == -2.0);
    CHECK(t(0, 2) == 0.0);
}

TEST_CASE("lambda zero on an identity-embedded basis is least squares") {
    const Index k = 6, l = 10;
    Matrix d = Matrix::Zero(k, l);
    d.leftCols(k).setIdentity();
    Instance in{oracle::gaussian(15, l, 3), d};
    SolverConfig cfg;
    cfg.lambda = 0.0;
    cfg.tol_primal = cfg.tol_dual = 1e-10;
    const SolveResult r = solve(in, cfg);
    CHECK(r.diagnostics.converged);
    CHECK((r.abundances.data() - in.x * d.transpose()).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("orthonormal dictionary matches the closed form") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Matrix d = oracle::orthonormal_rows(5, 12, 40 + seed);
        const Matrix x = oracle::gaussian(1, 12, 60 + seed);
        const double lambda = 0.3;
        SolverConfig cfg;
        cfg.lambda = lambda;
        cfg.tol_primal = cfg.tol_dual = 1e-10;
        const SolveResult r = solve({x, d}, cfg);
        const Matrix expected = soft_threshold(x * d.transpose(), lambda / 2);
        // Closed form per coordinate, written out independently.
        const Matrix c = x * d.transpose();
        for (Index j = 0; j < 5; ++j) {
            const double v = c(0, j);
            const double ref = std::abs(v) > lambda / 2 ? v - std::copysign(lambda / 2, v) : 0.0;
            CHECK(expected(0, j) == ref);
            CHECK(std::abs(r.abundances.data()(0, j) - ref) <= 1e-6);
        }
    }
}

TEST_CASE("lambda above the zero threshold gives the zero solution") {
    const Instance in = random_instance(12, 6, 20, 5);
    SolverConfig cfg;
    cfg.lambda = 2.0 * (in.x * in.d.transpose()).cwiseAbs().maxCoeff();
    const SolveResult r = solve(in, cfg);
    CHECK(r.abundances.data().cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("objective trace is non-increasing after iteration 5") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Index k = 4 + static_cast<Index>(seed % 17);
        const Index n = 10 + static_cast<Index>((seed * 7) % 41);
        const Instance in = random_instance(n, k, 2 * k + 10, 300 + seed);
        SolverConfig cfg;
        cfg.lambda = 0.1;
        const SolveResult r = solve(in, cfg);
        const auto &trace = r.diagnostics.objective_trace;
        REQUIRE(trace.size() == static_cast<std::size_t>(r.diagnostics.iterations));
        for (std::size_t i = 5; i + 1 < trace.size(); ++i)
            CHECK(trace[i + 1] <= trace[i] + 1e-9);
    }
}

TEST_CASE("ADMM matches the projected-gradient reference") {
    struct Mode {
        bool nonneg, sum_to_one;
        oracle::Constraint ref;
    };
    const Mode modes[] = {{false, false, oracle::Constraint::kNone},
                          {true, false, oracle::Constraint::kNonneg},
                          {true, true, oracle::Constraint::kSimplex}};
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const Index k = 2 + static_cast<Index>(seed % 7);
        const Index n = 1 + static_cast<Index>((seed * 3) % 10);
        const Instance in = random_instance(n, k, k + 6, 700 + seed);
        const Mode &mode = modes[seed % 3];
        const double lambda = 0.05 * std::pow(10.0, static_cast<double>(seed % 3));
        SolverConfig cfg;
        cfg.lambda = lambda;
        cfg.nonneg = mode.nonneg;
        cfg.sum_to_one = mode.sum_to_one;
        cfg.tol_primal = cfg.tol_dual = 1e-10;
        cfg.max_iter = 100000;
        const SolveResult r = solve(in, cfg);
        const Matrix ref = oracle::projected_gradient(in.x, in.d, lambda, mode.ref);
        CHECK((r.abundances.data() - ref).norm() <= 1e-4);
    }
}

TEST_CASE("constraints are satisfied") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Instance in = random_instance(30, 8, 25, 900 + seed);
        SolverConfig cfg;
        cfg.nonneg = true;
        CHECK(solve(in, cfg).abundances.data().minCoeff() >= -1e-9);
        cfg.sum_to_one = true;
        const Matrix both = solve(in, cfg).abundances.data();
        CHECK(both.minCoeff() >= -1e-9);
        CHECK((both.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-6);
        cfg.nonneg = false;
        const Matrix sto = solve(in, cfg).abundances.data();
        CHECK((sto.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-6);
    }
}

TEST_CASE("warm and cold starts agree") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Instance in = random_instance(25, 8, 30, 1100 + seed);
        SolverConfig cfg;
        cfg.nonneg = true;
        const SolveResult cold = solve(in, cfg);
        REQUIRE(cold.diagnostics.converged);
        cfg.warm_start = AbundanceMatrix(
            cold.abundances.data() + 0.1 * oracle::gaussian(25, 8, 1200 + seed).cwiseAbs());
        const SolveResult warm = solve(in, cfg);
        REQUIRE(warm.diagnostics.converged);
        const double scale = std::sqrt(25.0 * 8.0);
        CHECK((warm.abundances.data() - cold.abundances.data()).norm() / scale <=
              10.0 * cfg.tol_primal);
    }
}

TEST_CASE("diagnostics report what was used") {
    const Instance in = random_instance(10, 5, 12, 21);
    SolverConfig cfg;
    const SolveResult r = solve(in, cfg);
    CHECK(r.diagnostics.lambda == default_lambda(HsiCube(in.x), SpectralLibrary(in.d)));
    CHECK(r.diagnostics.rho == default_rho(SpectralLibrary(in.d)));
    CHECK(r.diagnostics.final_primal_residual >= 0.0);
    CHECK(r.diagnostics.final_dual_residual >= 0.0);
    cfg.max_iter = 2;
    const SolveResult capped = solve(in, cfg);
    CHECK_FALSE(capped.diagnostics.converged);
    CHECK(capped.diagnostics.iterations == 2);
}

TEST_CASE("solver errors") {
    const Instance in = random_instance(10, 5, 12, 22);
    CHECK(kind_of([&] { sunsal(HsiCube(in.x), SpectralLibrary(Matrix(in.d.leftCols(11))), {}); }) ==
          ErrorKind::DimensionMismatch);
    SolverConfig bad;
    bad.max_iter = 0;
    CHECK(kind_of([&] { solve(in, bad); }) == ErrorKind::InvalidArgument);
    bad = {};
    bad.lambda = -1.0;
    CHECK(kind_of([&] { solve(in, bad); }) == ErrorKind::InvalidArgument);
    bad = {};
    bad.warm_start = AbundanceMatrix(Matrix::Zero(3, 5));
    CHECK(kind_of([&] { solve(in, bad); }) == ErrorKind::DimensionMismatch);

    SolverConfig huge;
    huge.lambda = 0.0;
    Instance big{in.x * 1e13, in.d};
    CHECK(kind_of([&] { solve(big, huge); }) == ErrorKind::NonFiniteIterate);
}
