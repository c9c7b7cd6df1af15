#include <specprune/core.hpp>

#include <algorithm>
#include <unordered_set>

namespace specprune {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFiniteData: return "NonFiniteData";
    case ErrorKind::RaggedRows: return "RaggedRows";
    case ErrorKind::EmptyLibrary: return "EmptyLibrary";
    case ErrorKind::ZeroNormAtom: return "ZeroNormAtom";
    case ErrorKind::InvalidP: return "InvalidP";
    case ErrorKind::EmptyTrials: return "EmptyTrials";
    case ErrorKind::InfeasiblePurity: return "InfeasiblePurity";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::MissingFile: return "MissingFile";
    case ErrorKind::HeaderParse: return "HeaderParse";
    case ErrorKind::ValueParse: return "ValueParse";
    case ErrorKind::SizeMismatch: return "SizeMismatch";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::SingularRegression: return "SingularRegression";
    case ErrorKind::NonFiniteIterate: return "NonFiniteIterate";
    }
    return "Unknown";
}

int exit_code(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::MissingFile:
    case ErrorKind::HeaderParse:
    case ErrorKind::ValueParse:
    case ErrorKind::SizeMismatch:
    case ErrorKind::IoFailure:
        return 3;
    case ErrorKind::SingularRegression:
    case ErrorKind::NonFiniteIterate:
        return 4;
    default:
        return 2;
    }
}

namespace {

void check_wavelengths(const std::vector<double> &wl, Index bands) {
    if (wl.empty())
        return;
    if (static_cast<Index>(wl.size()) != bands)
        throw Error(ErrorKind::DimensionMismatch,
                    "wavelength count " + std::to_string(wl.size()) +
                        " != band count " + std::to_string(bands));
    for (std::size_t i = 1; i < wl.size(); ++i)
        if (!(wl[i] > wl[i - 1]))
            throw Error(ErrorKind::InvalidArgument,
                        "wavelengths must be strictly increasing");
}

} // namespace

HsiCube::HsiCube(Matrix data, std::vector<double> wavelengths)
    : HsiCube(std::move(data), -1, 1, std::move(wavelengths)) {}

HsiCube::HsiCube(Matrix data, Index lines, Index samples,
                 std::vector<double> wavelengths)
    : data_(std::move(data)), lines_(lines < 0 ? data_.rows() : lines),
      samples_(samples), wavelengths_(std::move(wavelengths)) {
    if (data_.rows() < 1)
        throw Error(ErrorKind::InvalidArgument, "cube needs at least one pixel");
    if (data_.cols() < 2)
        throw Error(ErrorKind::InvalidArgument, "cube needs at least two bands");
    if (lines_ * samples_ != data_.rows())
        throw Error(ErrorKind::DimensionMismatch,
                    "lines*samples != pixel count " + std::to_string(data_.rows()));
    check_wavelengths(wavelengths_, data_.cols());
}

void HsiCube::check_finite() const {
    for (Index r = 0; r < data_.rows(); ++r)
        for (Index c = 0; c < data_.cols(); ++c)
            if (!std::isfinite(data_(r, c)))
                throw Error(ErrorKind::NonFiniteData,
                            "cube pixel " + std::to_string(r) + ", band " +
                                std::to_string(c));
}

IndexSet::IndexSet(std::vector<Index> indices) : indices_(std::move(indices)) {
    std::unordered_set<Index> seen;
    for (Index i : indices_) {
        if (i < 0)
            throw Error(ErrorKind::IndexOutOfRange, "negative index " + std::to_string(i));
        if (!seen.insert(i).second)
            throw Error(ErrorKind::InvalidArgument, "duplicate index " + std::to_string(i));
    }
}

bool IndexSet::contains(Index i) const {
    return std::find(indices_.begin(), indices_.end(), i) != indices_.end();
}

bool IndexSet::includes(const IndexSet &other) const {
    return std::all_of(other.begin(), other.end(),
                       [this](Index i) { return contains(i); });
}

void IndexSet::check_bound(Index bound) const {
    for (Index i : indices_)
        if (i >= bound)
            throw Error(ErrorKind::IndexOutOfRange,
                        "index " + std::to_string(i) + " >= " + std::to_string(bound));
}

SpectralLibrary::SpectralLibrary(Matrix data, std::vector<std::string> names,
                                 std::vector<double> wavelengths)
    : data_(std::move(data)), names_(std::move(names)),
      wavelengths_(std::move(wavelengths)) {
    if (data_.rows() < 1)
        throw Error(ErrorKind::EmptyLibrary, "library has no atoms");
    if (data_.cols() < 2)
        throw Error(ErrorKind::InvalidArgument, "library needs at least two bands");
    if (names_.empty()) {
        names_.reserve(static_cast<std::size_t>(data_.rows()));
        for (Index i = 0; i < data_.rows(); ++i)
            names_.push_back("atom_" + std::to_string(i));
    }
    if (static_cast<Index>(names_.size()) != data_.rows())
        throw Error(ErrorKind::DimensionMismatch, "name count != atom count");
    check_wavelengths(wavelengths_, data_.cols());
}

SpectralLibrary SpectralLibrary::subset(const IndexSet &indices) const {
    if (indices.empty())
        throw Error(ErrorKind::EmptyLibrary, "empty atom selection");
    indices.check_bound(atoms());
    Matrix rows(static_cast<Index>(indices.size()), bands());
    std::vector<std::string> names;
    names.reserve(indices.size());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        rows.row(static_cast<Index>(i)) = data_.row(indices[i]);
        names.push_back(names_[static_cast<std::size_t>(indices[i])]);
    }
    return SpectralLibrary(std::move(rows), std::move(names), wavelengths_);
}

void SpectralLibrary::check_atoms() const {
    for (Index r = 0; r < data_.rows(); ++r) {
        if (!data_.row(r).allFinite())
            throw Error(ErrorKind::NonFiniteData, "library atom " + std::to_string(r));
        if (!(data_.row(r).norm() > 0.0))
            throw Error(ErrorKind::ZeroNormAtom, "library atom " + std::to_string(r));
    }
}

AbundanceMatrix::AbundanceMatrix(Matrix data, ConstraintMode mode)
    : data_(std::move(data)), mode_(mode) {}

bool AbundanceMatrix::satisfies_constraints() const {
    if (!data_.allFinite())
        return false;
    if (mode_.nonneg && data_.size() > 0 && data_.minCoeff() < -kNonnegSlack)
        return false;
    if (mode_.sum_to_one &&
        ((data_.rowwise().sum().array() - 1.0).abs() > kSumToOneSlack).any())
        return false;
    return true;
}

void validate_pair(const HsiCube &cube, const SpectralLibrary &lib) {
    if (cube.bands() != lib.bands())
        throw Error(ErrorKind::DimensionMismatch,
                    "cube has " + std::to_string(cube.bands()) + " bands, library has " +
                        std::to_string(lib.bands()));
    cube.check_finite();
    lib.check_atoms();
}

HsiCube reconstruct(const SpectralLibrary &lib, const AbundanceMatrix &m) {
    if (m.atoms() != lib.atoms())
        throw Error(ErrorKind::DimensionMismatch,
                    "abundance has " + std::to_string(m.atoms()) + " atoms, library has " +
                        std::to_string(lib.atoms()));
    return HsiCube(m.data() * lib.data());
}

} // namespace specprune
