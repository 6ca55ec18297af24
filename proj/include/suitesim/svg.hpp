#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "suitesim/coverage.hpp"
#include "suitesim/error.hpp"

namespace suitesim {
namespace svg {

inline std::string num(double value) {
    if (value == 0.0) value = 0.0;
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.2f", value);
    return buffer;
}

inline std::string escape(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

/// Linear white-to-dark-blue color scale on [0, 1].
inline std::string heat_color(double value) {
    const double t = std::clamp(value, 0.0, 1.0);
    const int r = static_cast<int>(std::lround(247.0 + t * (8.0 - 247.0)));
    const int g = static_cast<int>(std::lround(251.0 + t * (48.0 - 251.0)));
    const int b = static_cast<int>(std::lround(255.0 + t * (107.0 - 255.0)));
    char buffer[16];
    std::snprintf(buffer, sizeof(buffer), "#%02x%02x%02x", r, g, b);
    return buffer;
}

/// Similarity heatmap with numeric annotations. Rows and columns follow
/// `order` (typically the dendrogram leaf order) so similar suites sit
/// together, mirroring the reorganized-matrix figure style.
inline std::string similarity_heatmap(const SimilarityMatrix& sim,
                                      const std::vector<std::string>& order) {
    const std::size_t m = sim.suite_ids.size();
    require(order.size() == m, "heatmap: order must be a permutation of the suites");
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < m; ++i) index[sim.suite_ids[i]] = i;
    for (const auto& label : order) {
        require(index.count(label) == 1, "heatmap: unknown suite '" + label + "' in order");
    }

    const double cell = 56.0;
    const double left = 110.0;
    const double top = 70.0;
    const double width = left + cell * static_cast<double>(m) + 20.0;
    const double height = top + cell * static_cast<double>(m) + 20.0;

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
           num(height) + "\" font-family=\"sans-serif\">\n";
    out += "<rect width=\"" + num(width) + "\" height=\"" + num(height) + "\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(left) + "\" y=\"24\" font-size=\"15\">Cosine similarity between suite meta-representations</text>\n";

    for (std::size_t row = 0; row < m; ++row) {
        const std::size_t i = index.at(order[row]);
        const double y = top + cell * static_cast<double>(row);
        out += "<text x=\"" + num(left - 8.0) + "\" y=\"" + num(y + cell / 2.0 + 4.0) +
               "\" font-size=\"12\" text-anchor=\"end\">" + escape(order[row]) + "</text>\n";
        for (std::size_t col = 0; col < m; ++col) {
            const std::size_t j = index.at(order[col]);
            const double x = left + cell * static_cast<double>(col);
            const double value = sim.values[i][j];
            out += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(cell) +
                   "\" height=\"" + num(cell) + "\" fill=\"" + heat_color(value) +
                   "\" stroke=\"#cccccc\" stroke-width=\"0.5\"/>\n";
            const char* text_fill = value > 0.6 ? "#ffffff" : "#000000";
            out += "<text x=\"" + num(x + cell / 2.0) + "\" y=\"" + num(y + cell / 2.0 + 4.0) +
                   "\" font-size=\"12\" text-anchor=\"middle\" fill=\"" + text_fill + "\">" +
                   num(value) + "</text>\n";
        }
    }
    for (std::size_t col = 0; col < m; ++col) {
        const double x = left + cell * static_cast<double>(col) + cell / 2.0;
        out += "<text x=\"" + num(x) + "\" y=\"" + num(top - 10.0) +
               "\" font-size=\"12\" text-anchor=\"middle\">" + escape(order[col]) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

/// Rectangular dendrogram, leaves along the bottom in traversal order,
/// merge heights proportional to 1 - cosine distance.
inline std::string dendrogram_figure(const Dendrogram& dendro) {
    const std::size_t m = dendro.leaf_ids.size();
    require(dendro.merges.size() + 1 == m, "dendrogram figure: malformed dendrogram");

    const std::vector<std::string> order = leaf_order(dendro);
    std::map<std::string, std::size_t> slot;
    for (std::size_t i = 0; i < order.size(); ++i) slot[order[i]] = i;

    const double gap = 90.0;
    const double left = 50.0;
    const double top = 40.0;
    const double plot_height = 240.0;
    const double baseline = top + plot_height;
    const double width = left + gap * static_cast<double>(m) + 20.0;
    const double height = baseline + 60.0;

    double max_distance = 0.0;
    for (const auto& rec : dendro.merges) max_distance = std::max(max_distance, rec.distance);
    if (max_distance <= 0.0) max_distance = 1.0;
    const auto y_of = [&](double distance) { return baseline - plot_height * (distance / max_distance); };

    // per-node x position and height; leaves first, merges in order
    std::vector<double> node_x(m + dendro.merges.size());
    std::vector<double> node_y(m + dendro.merges.size(), baseline);
    for (std::size_t i = 0; i < m; ++i) {
        node_x[i] = left + gap * (static_cast<double>(slot.at(dendro.leaf_ids[i])) + 0.5);
    }

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
           num(height) + "\" font-family=\"sans-serif\">\n";
    out += "<rect width=\"" + num(width) + "\" height=\"" + num(height) + "\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(left) + "\" y=\"22\" font-size=\"15\">Suite dendrogram (average linkage, 1 - cosine)</text>\n";

    for (std::size_t i = 0; i < dendro.merges.size(); ++i) {
        const DendrogramMerge& rec = dendro.merges[i];
        const double y = y_of(rec.distance);
        const double xl = node_x[rec.left];
        const double xr = node_x[rec.right];
        out += "<path d=\"M " + num(xl) + " " + num(node_y[rec.left]) + " L " + num(xl) + " " +
               num(y) + " L " + num(xr) + " " + num(y) + " L " + num(xr) + " " +
               num(node_y[rec.right]) + "\" fill=\"none\" stroke=\"#1f6fb4\" stroke-width=\"1.5\"/>\n";
        node_x[m + i] = (xl + xr) / 2.0;
        node_y[m + i] = y;
    }

    for (std::size_t i = 0; i < order.size(); ++i) {
        const double x = left + gap * (static_cast<double>(i) + 0.5);
        out += "<text x=\"" + num(x) + "\" y=\"" + num(baseline + 20.0) +
               "\" font-size=\"12\" text-anchor=\"middle\">" + escape(order[i]) + "</text>\n";
    }

    // distance axis: four ticks from 0 to max
    for (int tick = 0; tick <= 3; ++tick) {
        const double distance = max_distance * static_cast<double>(tick) / 3.0;
        const double y = y_of(distance);
        out += "<line x1=\"" + num(left - 6.0) + "\" y1=\"" + num(y) + "\" x2=\"" + num(left) +
               "\" y2=\"" + num(y) + "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
        out += "<text x=\"" + num(left - 10.0) + "\" y=\"" + num(y + 4.0) +
               "\" font-size=\"10\" text-anchor=\"end\">" + num(distance) + "</text>\n";
    }
    out += "<line x1=\"" + num(left) + "\" y1=\"" + num(y_of(max_distance)) + "\" x2=\"" + num(left) +
           "\" y2=\"" + num(baseline) + "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    out += "</svg>\n";
    return out;
}

}  // namespace svg
}  // namespace suitesim
