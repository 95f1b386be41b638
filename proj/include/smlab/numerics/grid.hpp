#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace smlab::numerics {

// Uniform 1-D grid on [lo, hi] with n >= 16 nodes, nodes[0] = lo, nodes[n-1] = hi.
struct Grid1D {
    double lo = 0.0;
    double hi = 1.0;
    std::size_t n = 16;
    std::vector<double> nodes;

    Grid1D() = default;
    Grid1D(double lo_, double hi_, std::size_t n_) : lo(lo_), hi(hi_), n(n_) {
        if (!(hi > lo)) throw std::invalid_argument("Grid1D: hi must exceed lo");
        if (n < 16) throw std::invalid_argument("Grid1D: need at least 16 nodes");
        nodes.resize(n);
        const double h = (hi - lo) / double(n - 1);
        for (std::size_t i = 0; i < n; ++i) nodes[i] = lo + h * double(i);
        nodes.front() = lo;
        nodes.back() = hi;
    }

    double spacing() const { return (hi - lo) / double(n - 1); }
};

} // namespace smlab::numerics
