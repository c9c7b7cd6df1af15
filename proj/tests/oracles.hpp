#pragma once

// Reference implementations used only to check the library. They share no
// code path with the routines under test.

#include <specprune/core.hpp>
#include <specprune/rng.hpp>

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>

namespace oracle {

using specprune::Index;
using specprune::Matrix;

/// Sum of singular values from a two-sided Jacobi SVD.
inline double svd_nuclear_norm(const Matrix &m) {
    if (m.size() == 0)
        return 0.0;
    return Eigen::JacobiSVD<Matrix>(m).singularValues().sum();
}

enum class Constraint { kNone, kNonneg, kSimplex };

inline void project_simplex_row(Eigen::Ref<Matrix> row) {
    std::vector<double> v(row.data(), row.data() + row.size());
    // `row` is a 1 x K block of a row-major copy.
    std::sort(v.begin(), v.end(), std::greater<>());
    double cum = 0.0, theta = 0.0;
    for (std::size_t j = 0; j < v.size(); ++j) {
        cum += v[j];
        const double t = (cum - 1.0) / static_cast<double>(j + 1);
        if (v[j] - t > 0.0)
            theta = t;
    }
    for (Index j = 0; j < row.size(); ++j)
        row(0, j) = std::max(row(0, j) - theta, 0.0);
}

/// Proximal/projected gradient on ||X - M D||_F^2 + lambda ||M||_1 with step
/// 1 / (2 ||D||_2^2).
inline Matrix projected_gradient(const Matrix &x, const Matrix &d, double lambda,
                                 Constraint constraint, int iterations = 100000) {
    const double spectral = Eigen::JacobiSVD<Matrix>(d).singularValues()(0);
    const double step = 1.0 / (2.0 * spectral * spectral);
    const Matrix gram = d * d.transpose();
    const Matrix xdt = x * d.transpose();
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> m =
        Matrix::Zero(x.rows(), d.rows());
    if (constraint == Constraint::kSimplex)
        m.setConstant(1.0 / static_cast<double>(d.rows()));
    for (int it = 0; it < iterations; ++it) {
        m -= step * 2.0 * (m * gram - xdt);
        const double tau = step * lambda;
        switch (constraint) {
        case Constraint::kNone:
            m = m.unaryExpr([tau](double v) {
                return std::abs(v) > tau ? std::copysign(std::abs(v) - tau, v) : 0.0;
            });
            break;
        case Constraint::kNonneg:
            m = (m.array() - tau).cwiseMax(0.0);
            break;
        case Constraint::kSimplex:
            for (Index r = 0; r < m.rows(); ++r) {
                Matrix row = m.row(r);
                project_simplex_row(row);
                m.row(r) = row;
            }
            break;
        }
    }
    return m;
}

inline double objective(const Matrix &x, const Matrix &m, const Matrix &d, double lambda) {
    return (x - m * d).squaredNorm() + lambda * m.cwiseAbs().sum();
}

/// Independent Gaussian matrix from a seeded stream.
inline Matrix gaussian(Index rows, Index cols, std::uint64_t seed) {
    specprune::CounterRng rng(seed, 99);
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c)
            m(r, c) = rng.normal();
    return m;
}

/// K x L matrix with orthonormal rows (K <= L).
inline Matrix orthonormal_rows(Index k, Index l, std::uint64_t seed) {
    const Matrix g = gaussian(l, k, seed);
    const Matrix q = Eigen::HouseholderQR<Matrix>(g).householderQ() * Matrix::Identity(l, k);
    return q.transpose();
}

inline std::filesystem::path temp_dir(const std::string &name) {
    auto dir = std::filesystem::temp_directory_path() / ("specprune_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace oracle
