#pragma once

#include <specprune/core.hpp>

#include <string>
#include <vector>

namespace specprune {

/// SVG scatter of per-atom scores against atom index. Atoms in `highlight`
/// are drawn in red; NaN scores are skipped.
std::string score_plot_svg(const std::vector<double> &scores, const IndexSet &highlight,
                           const std::string &title);

} // namespace specprune
