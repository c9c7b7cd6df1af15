#pragma once

#include <specprune/error.hpp>

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace specprune {

// Row convention used everywhere: pixels are rows of X and M, atoms are rows
// of D, so that X = M * D.
using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

/// Numerical slack accepted on abundance constraints.
inline constexpr double kNonnegSlack = 1e-9;
inline constexpr double kSumToOneSlack = 1e-6;

/// Reflectance cube stored pixel-major: N rows (pixels) x L columns (bands).
///
/// Construction checks shape invariants only. Finiteness is checked by the
/// loaders and by validate_pair(), so a cube holding NaN can exist long
/// enough to be rejected with a precise location.
class HsiCube {
  public:
    /// Pixel list: lines = N, samples = 1.
    explicit HsiCube(Matrix data, std::vector<double> wavelengths = {});
    HsiCube(Matrix data, Index lines, Index samples,
            std::vector<double> wavelengths = {});

    const Matrix &data() const noexcept { return data_; }
    Index pixels() const noexcept { return data_.rows(); }
    Index bands() const noexcept { return data_.cols(); }
    Index lines() const noexcept { return lines_; }
    Index samples() const noexcept { return samples_; }
    const std::vector<double> &wavelengths() const noexcept { return wavelengths_; }

    /// Throws NonFiniteData naming the first offending (pixel, band).
    void check_finite() const;

  private:
    Matrix data_;
    Index lines_;
    Index samples_;
    std::vector<double> wavelengths_;
};

/// Ordered set of distinct atom indices.
class IndexSet {
  public:
    IndexSet() = default;
    explicit IndexSet(std::vector<Index> indices);

    const std::vector<Index> &indices() const noexcept { return indices_; }
    std::size_t size() const noexcept { return indices_.size(); }
    bool empty() const noexcept { return indices_.empty(); }
    Index operator[](std::size_t i) const { return indices_[i]; }
    auto begin() const noexcept { return indices_.begin(); }
    auto end() const noexcept { return indices_.end(); }

    bool contains(Index i) const;
    /// True when every index of `other` is also in this set.
    bool includes(const IndexSet &other) const;
    /// Throws IndexOutOfRange unless every index is in [0, bound).
    void check_bound(Index bound) const;

    friend bool operator==(const IndexSet &, const IndexSet &) = default;

  private:
    std::vector<Index> indices_;
};

/// Spectral library stored atom-major: K rows (atoms) x L columns (bands).
class SpectralLibrary {
  public:
    /// Atom names default to "atom_<i>".
    explicit SpectralLibrary(Matrix data, std::vector<std::string> names = {},
                             std::vector<double> wavelengths = {});

    const Matrix &data() const noexcept { return data_; }
    Index atoms() const noexcept { return data_.rows(); }
    Index bands() const noexcept { return data_.cols(); }
    const std::vector<std::string> &names() const noexcept { return names_; }
    const std::vector<double> &wavelengths() const noexcept { return wavelengths_; }

    /// Rows selected by `indices`, in that order.
    SpectralLibrary subset(const IndexSet &indices) const;

    /// Throws NonFiniteData or ZeroNormAtom.
    void check_atoms() const;

  private:
    Matrix data_;
    std::vector<std::string> names_;
    std::vector<double> wavelengths_;
};

struct ConstraintMode {
    bool nonneg = false;
    bool sum_to_one = false;

    friend bool operator==(const ConstraintMode &, const ConstraintMode &) = default;
};

/// Mixing matrix M: N rows (pixels) x K columns (atoms).
class AbundanceMatrix {
  public:
    explicit AbundanceMatrix(Matrix data, ConstraintMode mode = {});

    const Matrix &data() const noexcept { return data_; }
    Index pixels() const noexcept { return data_.rows(); }
    Index atoms() const noexcept { return data_.cols(); }
    ConstraintMode constraints() const noexcept { return mode_; }

    /// Verifies finiteness and the enforced constraints within the fixed slack.
    bool satisfies_constraints() const;

  private:
    Matrix data_;
    ConstraintMode mode_;
};

/// Succeeds iff the band counts agree and both operands are finite with
/// nonzero atoms.
void validate_pair(const HsiCube &cube, const SpectralLibrary &lib);

/// X_hat = M * D.
HsiCube reconstruct(const SpectralLibrary &lib, const AbundanceMatrix &m);

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived> &m) {
    return m.allFinite();
}

} // namespace specprune
