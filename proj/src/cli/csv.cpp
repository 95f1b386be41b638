#include "smlab/cli/rows.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <tuple>

#include "smlab/errors.hpp"

namespace smlab::cli {

void sort_rows(std::vector<ResultRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& x, const ResultRow& y) {
        return std::tie(x.experiment, x.param, x.seed, x.method, x.metric) <
               std::tie(y.experiment, y.param, y.seed, y.method, y.metric);
    });
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

} // namespace

std::string csv_string(std::vector<ResultRow> rows) {
    sort_rows(rows);
    std::string out = "experiment,seed,param,method,metric,value\n";
    for (const auto& r : rows) {
        out += r.experiment;
        out += ',';
        out += std::to_string(r.seed);
        out += ',';
        out += fmt(r.param);
        out += ',';
        out += r.method;
        out += ',';
        out += r.metric;
        out += ',';
        out += fmt(r.value);
        out += '\n';
    }
    return out;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    if (rows.empty()) throw IoError("refusing to emit an empty result set", path);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing", path);
    f << csv_string(rows);
    if (!f) throw IoError("write failed", path);
}

} // namespace smlab::cli
