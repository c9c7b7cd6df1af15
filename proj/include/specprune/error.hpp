#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace specprune {

enum class ErrorKind {
    // validation
    DimensionMismatch,
    NonFiniteData,
    RaggedRows,
    EmptyLibrary,
    ZeroNormAtom,
    InvalidP,
    EmptyTrials,
    InfeasiblePurity,
    IndexOutOfRange,
    InvalidArgument,
    // file handling
    MissingFile,
    HeaderParse,
    ValueParse,
    SizeMismatch,
    IoFailure,
    // numerical
    SingularRegression,
    NonFiniteIterate,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Process exit code for an error kind: 2 validation, 3 I/O, 4 numerical.
int exit_code(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string &message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message),
          kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

} // namespace specprune
