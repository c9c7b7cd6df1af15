#include <specprune/core.hpp>

#include "oracles.hpp"

#include <doctest.h>

#include <limits>

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

SpectralLibrary random_library(Index k, Index l, std::uint64_t seed) {
    return SpectralLibrary(oracle::gaussian(k, l, seed).cwiseAbs().array() + 0.1);
}

} // namespace

TEST_CASE("validate_pair accepts matching band counts") {
    const HsiCube cube(Matrix::Ones(4, 100));
    CHECK_NOTHROW(validate_pair(cube, random_library(3, 100, 1)));
}

TEST_CASE("validate_pair rejects a band mismatch") {
    const HsiCube cube(Matrix::Ones(4, 100));
    CHECK(kind_of([&] { validate_pair(cube, random_library(3, 182, 1)); }) ==
          ErrorKind::DimensionMismatch);
}

TEST_CASE("validate_pair rejects a NaN in the cube") {
    Matrix x = Matrix::Ones(4, 10);
    x(2, 3) = std::numeric_limits<double>::quiet_NaN();
    const HsiCube cube(x);
    CHECK(kind_of([&] { validate_pair(cube, random_library(3, 10, 1)); }) ==
          ErrorKind::NonFiniteData);
}

TEST_CASE("reconstruct with identity abundances returns the library") {
    const SpectralLibrary lib = random_library(6, 9, 2);
    const HsiCube x = reconstruct(lib, AbundanceMatrix(Matrix::Identity(6, 6)));
    CHECK(x.pixels() == 6);
    CHECK(x.bands() == 9);
    CHECK(x.data() == lib.data());
}

TEST_CASE("reconstruct with zero abundances is zero") {
    const SpectralLibrary lib = random_library(5, 7, 3);
    const HsiCube x = reconstruct(lib, AbundanceMatrix(Matrix::Zero(11, 5)));
    CHECK(x.data().isZero(0.0));
}

TEST_CASE("one-hot abundances give pure pixels") {
    const SpectralLibrary lib = random_library(5, 7, 4);
    Matrix m = Matrix::Zero(8, 5);
    m.col(3).setOnes();
    const HsiCube x = reconstruct(lib, AbundanceMatrix(m));
    for (Index r = 0; r < x.pixels(); ++r)
        CHECK(x.data().row(r) == lib.data().row(3));
}

TEST_CASE("reconstruct rejects an abundance width that is not K") {
    const SpectralLibrary lib = random_library(5, 7, 5);
    CHECK(kind_of([&] { reconstruct(lib, AbundanceMatrix(Matrix::Zero(3, 4))); }) ==
          ErrorKind::DimensionMismatch);
}

TEST_CASE("reconstruct is linear") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const SpectralLibrary lib = random_library(6, 12, 100 + seed);
        const Matrix m1 = oracle::gaussian(9, 6, 200 + seed);
        const Matrix m2 = oracle::gaussian(9, 6, 300 + seed);
        const double a = 0.7, b = -1.3;
        const Matrix lhs = reconstruct(lib, AbundanceMatrix(a * m1 + b * m2)).data();
        const Matrix rhs = a * reconstruct(lib, AbundanceMatrix(m1)).data() +
                           b * reconstruct(lib, AbundanceMatrix(m2)).data();
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-10);
    }
}

TEST_CASE("shapes follow the pixels-as-rows convention") {
    const SpectralLibrary lib = random_library(4, 10, 6);
    CHECK(lib.atoms() == 4);
    CHECK(lib.bands() == 10);
    const HsiCube x(Matrix::Zero(6, 10), 2, 3);
    CHECK(x.pixels() == 6);
    CHECK(x.lines() == 2);
    CHECK(x.samples() == 3);
    const AbundanceMatrix m(Matrix::Zero(6, 4));
    CHECK(m.pixels() == 6);
    CHECK(m.atoms() == 4);
    CHECK(kind_of([] { HsiCube(Matrix::Zero(6, 10), 4, 2); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("IndexSet rejects duplicates and out-of-range indices") {
    CHECK(kind_of([] { IndexSet({1, 2, 1}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { IndexSet({-1}); }) == ErrorKind::IndexOutOfRange);
    const IndexSet s({4, 0, 2});
    CHECK(s.contains(2));
    CHECK_FALSE(s.contains(1));
    CHECK(s.includes(IndexSet({0, 4})));
    CHECK_FALSE(s.includes(IndexSet({0, 1})));
    CHECK_NOTHROW(s.check_bound(5));
    CHECK(kind_of([&] { s.check_bound(4); }) == ErrorKind::IndexOutOfRange);
}

TEST_CASE("SpectralLibrary subset keeps order and names") {
    Matrix d(3, 2);
    d << 1, 2, 3, 4, 5, 6;
    const SpectralLibrary lib(d, {"a", "b", "c"});
    const SpectralLibrary sub = lib.subset(IndexSet({2, 0}));
    CHECK(sub.names() == std::vector<std::string>{"c", "a"});
    CHECK(sub.data().row(0) == d.row(2));
    CHECK(kind_of([] { SpectralLibrary(Matrix::Ones(0, 3)); }) == ErrorKind::EmptyLibrary);
    CHECK(kind_of([] { SpectralLibrary(Matrix::Zero(2, 3)).check_atoms(); }) ==
          ErrorKind::ZeroNormAtom);
}

TEST_CASE("AbundanceMatrix constraint slack") {
    Matrix m(2, 2);
    m << -1e-10, 1.0 + 1e-10, 0.5, 0.5;
    CHECK(AbundanceMatrix(m, {true, true}).satisfies_constraints());
    m(0, 0) = -1e-8;
    CHECK_FALSE(AbundanceMatrix(m, {true, false}).satisfies_constraints());
    m << 0.3, 0.3, 0.5, 0.5;
    CHECK_FALSE(AbundanceMatrix(m, {false, true}).satisfies_constraints());
    CHECK(AbundanceMatrix(m, {true, false}).satisfies_constraints());
}

TEST_CASE("error kinds map to exit codes") {
    CHECK(exit_code(ErrorKind::InfeasiblePurity) == 2);
    CHECK(exit_code(ErrorKind::InvalidP) == 2);
    CHECK(exit_code(ErrorKind::MissingFile) == 3);
    CHECK(exit_code(ErrorKind::IoFailure) == 3);
    CHECK(exit_code(ErrorKind::NonFiniteIterate) == 4);
    CHECK(exit_code(ErrorKind::SingularRegression) == 4);
}
