#pragma once

#include <specprune/core.hpp>

#include <optional>
#include <string>
#include <vector>

namespace specprune {

struct NoiseEstimate {
    /// Per-pixel, per-band regression residual (N x L).
    Matrix noise;
    /// Sample standard deviation of each noise band.
    std::vector<double> band_sigma;
    /// Degenerate-input notices (single pixel, constant bands, N < L).
    std::vector<std::string> warnings;
};

/// Multiple-linear-regression noise estimate.
///
/// Each band is regressed on all other bands by damped least squares,
/// beta = (Y^T Y + ridge I)^-1 Y^T x_i, and the residual x_i - Y beta is the
/// noise of that band. Bands are independent. With `ridge` unset the
/// minimum-norm least-squares solution is used (the ridge -> 0 limit), with
/// normal-matrix eigenvalues below L * eps * max treated as zero. A
/// single-pixel cube yields zero noise; constant bands get zero noise and are
/// excluded as regressors.
///
/// Throws SingularRegression when ridge == 0 and a normal matrix is singular.
NoiseEstimate estimate_noise_mlr(const HsiCube &cube, std::optional<double> ridge = {},
                                 std::size_t threads = 1);

/// cube - estimate_noise_mlr(cube).noise. Warnings are appended to `warnings`
/// when given.
HsiCube denoise(const HsiCube &cube, std::optional<double> ridge = {},
                std::vector<std::string> *warnings = nullptr);

} // namespace specprune
