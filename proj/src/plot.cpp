#include <specprune/plot.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace specprune {

std::string score_plot_svg(const std::vector<double> &scores, const IndexSet &highlight,
                           const std::string &title) {
    constexpr double width = 720, height = 360, left = 70, right = 20, top = 40, bottom = 50;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double s : scores)
        if (std::isfinite(s)) {
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
    if (!std::isfinite(lo)) {
        lo = 0.0;
        hi = 1.0;
    }
    if (hi == lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double n = static_cast<double>(std::max<std::size_t>(scores.size(), 2) - 1);
    auto px = [&](double i) { return left + (width - left - right) * i / n; };
    auto py = [&](double v) { return top + (height - top - bottom) * (hi - v) / (hi - lo); };

    std::string svg;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%g\" height=\"%g\">\n",
                  width, height);
    svg += buf;
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">", left);
    svg += buf;
    for (char c : title) {
        if (c == '<') svg += "&lt;";
        else if (c == '>') svg += "&gt;";
        else if (c == '&') svg += "&amp;";
        else svg += c;
    }
    svg += "</text>\n";
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n"
                  "<line x1=\"%g\" y1=\"%g\" x2=\"%g\" y2=\"%g\" stroke=\"black\"/>\n",
                  left, height - bottom, width - right, height - bottom, left, top, left,
                  height - bottom);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"11\">%.4g</text>\n"
                  "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"11\">%.4g</text>\n"
                  "<text x=\"%g\" y=\"%g\" font-family=\"sans-serif\" font-size=\"12\">atom index</text>\n",
                  4.0, top + 4, hi, 4.0, height - bottom, lo, width / 2 - 30, height - 15);
    svg += buf;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!std::isfinite(scores[i]))
            continue;
        const bool hit = highlight.contains(static_cast<Index>(i));
        std::snprintf(buf, sizeof buf,
                      "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"%d\" fill=\"%s\"/>\n",
                      px(static_cast<double>(i)), py(scores[i]), hit ? 5 : 3,
                      hit ? "red" : "steelblue");
        svg += buf;
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace specprune
