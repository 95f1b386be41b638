#pragma once

#include <string>
#include <vector>

#include "smlab/cli/rows.hpp"

namespace smlab::cli {

// One plotted series: rows matching (method, metric), aggregated per param by
// the median over seeds.
struct SeriesSpec {
    std::string method;
    std::string metric;
    std::string label;
};

struct PlotSpec {
    std::string title;
    std::string x_label = "param";
    std::string y_label = "value";
    bool log_y = false;
    std::vector<SeriesSpec> series;
};

// Minimal SVG 1.1 line/scatter plot; byte-stable for identical inputs.
std::string svg_string(const std::vector<ResultRow>& rows, const PlotSpec& spec);
void emit_svg(const std::vector<ResultRow>& rows, const PlotSpec& spec,
              const std::string& path);

} // namespace smlab::cli
