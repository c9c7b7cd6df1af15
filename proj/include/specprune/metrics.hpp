#pragma once

#include <specprune/core.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>
#include <vector>

namespace specprune {

/// Spectral angle in radians: arccos of the normalised inner product.
///
/// Evaluated as 2 atan2(||u - v||, ||u + v||) on the unit vectors, which is
/// the same angle without arccos losing half the digits near 0 and pi.
template <typename DerivedA, typename DerivedB>
double sad(const Eigen::MatrixBase<DerivedA> &s, const Eigen::MatrixBase<DerivedB> &s_hat) {
    if (s.size() != s_hat.size())
        throw Error(ErrorKind::DimensionMismatch, "sad operands differ in length");
    const double ns = s.norm();
    const double nh = s_hat.norm();
    if (!(ns > 0.0) || !(nh > 0.0))
        throw Error(ErrorKind::ZeroNormAtom, "sad operand has zero norm");
    const auto u = (s.reshaped() / ns).eval();
    const auto v = (s_hat.reshaped() / nh).eval();
    const double angle = 2.0 * std::atan2((u - v).norm(), (u + v).norm());
    return std::clamp(angle, 0.0, std::numbers::pi);
}

/// 10 log10(||X||_F / ||X - X_hat||_F), with unsquared norms. Returns +inf
/// when the reconstruction is exact.
template <typename DerivedA, typename DerivedB>
double sre_db(const Eigen::MatrixBase<DerivedA> &x, const Eigen::MatrixBase<DerivedB> &x_hat) {
    if (x.rows() != x_hat.rows() || x.cols() != x_hat.cols())
        throw Error(ErrorKind::DimensionMismatch, "sre operands differ in shape");
    const double err = (x - x_hat).norm();
    if (err == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(x.norm() / err);
}

double sre(const HsiCube &x, const HsiCube &x_hat);

struct AsadResult {
    double value = 0.0;
    /// (true atom, estimated atom) pairs in matching order.
    std::vector<std::pair<Index, Index>> matching;
    /// Angle per true atom; pi/2 for unmatched atoms.
    std::vector<double> per_true_sad;
};

/// Greedy min-angle one-to-one matching of estimated to true atoms; the mean
/// is taken over the true atoms, each unmatched one counting pi/2.
AsadResult asad(const SpectralLibrary &true_lib, const SpectralLibrary &est_lib);

/// Fraction of trials whose true set is contained in the estimated set.
double detection_probability(const std::vector<IndexSet> &true_sets,
                             const std::vector<IndexSet> &est_sets);

struct EvalReport {
    double asad = 0.0;
    double sre_db = 0.0;
    double detection = 0.0;
    std::vector<double> per_endmember_sad;
};

} // namespace specprune
