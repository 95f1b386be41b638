#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace smlab::cli {

// One record of experiment output. CSV schema:
// experiment,seed,param,method,metric,value
struct ResultRow {
    std::string experiment;
    std::uint64_t seed = 0;
    double param = 0.0;
    std::string method;   // sm | mle | pl | rm | na
    std::string metric;
    double value = 0.0;
};

// Canonical order: param, then seed, then method, then metric.
void sort_rows(std::vector<ResultRow>& rows);

// Deterministic rendering (%.12g values, no timestamps); rows are sorted
// into canonical order first.
std::string csv_string(std::vector<ResultRow> rows);

// Writes csv_string to path; refuses an empty row list. Throws IoError.
void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);

} // namespace smlab::cli
