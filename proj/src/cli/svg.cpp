#include "smlab/cli/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "smlab/errors.hpp"

namespace smlab::cli {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

const char* kColors[] = {"#c0392b", "#2471a3", "#1e8449", "#7d3c98", "#b7950b", "#17202a"};

} // namespace

std::string svg_string(const std::vector<ResultRow>& rows, const PlotSpec& spec) {
    // aggregate: per series, param -> median value over seeds
    struct Pt { double x, y; };
    std::vector<std::vector<Pt>> series_pts;
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& s : spec.series) {
        std::map<double, std::vector<double>> by_param;
        for (const auto& r : rows)
            if (r.method == s.method && r.metric == s.metric) by_param[r.param].push_back(r.value);
        std::vector<Pt> pts;
        for (auto& [p, vals] : by_param) {
            std::sort(vals.begin(), vals.end());
            double med = 0.5 * (vals[vals.size() / 2] + vals[(vals.size() - 1) / 2]);
            if (spec.log_y && !(med > 0.0)) continue;
            const double y = spec.log_y ? std::log10(med) : med;
            pts.push_back({p, y});
            xmin = std::min(xmin, p);
            xmax = std::max(xmax, p);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
        series_pts.push_back(std::move(pts));
    }
    if (!(xmax >= xmin)) { xmin = 0.0; xmax = 1.0; }
    if (!(ymax >= ymin)) { ymin = 0.0; ymax = 1.0; }
    if (xmax == xmin) { xmax += 0.5; xmin -= 0.5; }
    if (ymax == ymin) { ymax += 0.5; ymin -= 0.5; }

    const double W = 640, H = 480, L = 70, R = 20, T = 40, B = 50;
    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"640\" "
           "height=\"480\" viewBox=\"0 0 640 480\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"#ffffff\"/>\n";
    out += "<text x=\"320\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"15\">" + spec.title + "</text>\n";
    // axes
    out += "<line x1=\"" + fmt(L) + "\" y1=\"" + fmt(H - B) + "\" x2=\"" + fmt(W - R) +
           "\" y2=\"" + fmt(H - B) + "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    out += "<line x1=\"" + fmt(L) + "\" y1=\"" + fmt(T) + "\" x2=\"" + fmt(L) + "\" y2=\"" +
           fmt(H - B) + "\" stroke=\"#000000\" stroke-width=\"1\"/>\n";
    // axis ticks (4 intervals)
    for (int k = 0; k <= 4; ++k) {
        const double xv = xmin + (xmax - xmin) * k / 4.0;
        const double yv = ymin + (ymax - ymin) * k / 4.0;
        out += "<text x=\"" + fmt(px(xv)) + "\" y=\"" + fmt(H - B + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
               fmt(xv) + "</text>\n";
        out += "<text x=\"" + fmt(L - 8) + "\" y=\"" + fmt(py(yv) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
               (spec.log_y ? ("1e" + fmt(yv)) : fmt(yv)) + "</text>\n";
    }
    out += "<text x=\"" + fmt((L + W - R) / 2) + "\" y=\"" + fmt(H - 12) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" +
           spec.x_label + "</text>\n";
    out += "<text x=\"16\" y=\"" + fmt((T + H - B) / 2) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
           "transform=\"rotate(-90 16 " + fmt((T + H - B) / 2) + ")\">" + spec.y_label +
           "</text>\n";

    for (std::size_t si = 0; si < series_pts.size(); ++si) {
        const char* color = kColors[si % 6];
        std::string pl = "<polyline fill=\"none\" stroke=\"";
        pl += color;
        pl += "\" stroke-width=\"2\" points=\"";
        for (const auto& p : series_pts[si])
            pl += fmt(px(p.x)) + "," + fmt(py(p.y)) + " ";
        pl += "\"/>\n";
        out += pl;
        for (const auto& p : series_pts[si])
            out += "<circle cx=\"" + fmt(px(p.x)) + "\" cy=\"" + fmt(py(p.y)) +
                   "\" r=\"3\" fill=\"" + color + "\"/>\n";
        out += "<text x=\"" + fmt(W - R - 10) + "\" y=\"" + fmt(T + 16.0 * double(si) + 12) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" +
               color + "\">" + spec.series[si].label + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

void emit_svg(const std::vector<ResultRow>& rows, const PlotSpec& spec,
              const std::string& path) {
    if (rows.empty()) throw IoError("refusing to emit an empty result set", path);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing", path);
    f << svg_string(rows, spec);
    if (!f) throw IoError("write failed", path);
}

} // namespace smlab::cli
