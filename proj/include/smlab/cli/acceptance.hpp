#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace smlab::cli {

struct CriterionResult {
    int id = 0;
    std::string description;
    bool pass = false;
    std::string detail;
};

// Runs the full acceptance suite (criteria 1-13), printing one pass/fail line
// per criterion to `out`. Returns the per-criterion results.
std::vector<CriterionResult> run_acceptance(std::ostream& out);

} // namespace smlab::cli
