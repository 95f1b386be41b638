// Acceptance suite runner: one pass/fail line per criterion, nonzero exit on
// any failure. Also reachable as `smlab check`.
#include <iostream>

#include "smlab/cli/acceptance.hpp"

int main() {
    const auto results = smlab::cli::run_acceptance(std::cout);
    int failures = 0;
    for (const auto& r : results)
        if (!r.pass) ++failures;
    return failures == 0 ? 0 : 1;
}
