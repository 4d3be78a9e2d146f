#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace ewm {

// Uniform radial mesh on [r_min, r_max]. Evolution grids start at r_min = 1
// exactly (the excised-ball boundary); exterior data grids start at R >= 1.
struct RadialGrid {
    double r_min = 1.0;
    double r_max = 0.0;
    int npoints = 0;
    double dr = 0.0;

    static RadialGrid make(double r_min, double r_max, int npoints) {
        if (npoints < 2 || r_max <= r_min)
            throw std::invalid_argument("RadialGrid: need r_max > r_min and npoints >= 2");
        RadialGrid g;
        g.r_min = r_min;
        g.r_max = r_max;
        g.npoints = npoints;
        g.dr = (r_max - r_min) / (npoints - 1);
        return g;
    }

    // Grid for wave evolution: pinned at r = 1, at least 16 nodes.
    static RadialGrid unit(double r_max, int npoints) {
        if (npoints < 16)
            throw std::invalid_argument("RadialGrid: evolution grid needs npoints >= 16");
        return make(1.0, r_max, npoints);
    }

    double r(int i) const { return r_min + i * dr; }

    // First node with r(i) >= value (clamped to [0, npoints-1]).
    int index_at_or_above(double value) const {
        int i = static_cast<int>(std::ceil((value - r_min) / dr - 1e-12));
        if (i < 0) i = 0;
        if (i > npoints - 1) i = npoints - 1;
        return i;
    }
};

}  // namespace ewm
