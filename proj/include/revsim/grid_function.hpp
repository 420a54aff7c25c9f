#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace revsim {

// Piecewise-linear function on an ordered grid.  Evaluation clamps to the
// endpoints, which is the right convention for value functions on [p_bar, 1].
struct GridFunction {
    std::vector<double> xs;
    std::vector<double> ys;

    GridFunction() = default;
    GridFunction(std::vector<double> x, std::vector<double> y)
        : xs(std::move(x)), ys(std::move(y)) {
        if (xs.size() != ys.size() || xs.size() < 2)
            throw std::invalid_argument("GridFunction: need matching grids of size >= 2");
    }

    std::size_t size() const { return xs.size(); }

    // index of the cell [xs[i], xs[i+1]] containing x
    std::size_t cell(double x) const {
        if (x <= xs.front()) return 0;
        if (x >= xs[xs.size() - 2]) return xs.size() - 2;
        return static_cast<std::size_t>(
                   std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 1;
    }

    double operator()(double x) const {
        if (x <= xs.front()) return ys.front();
        if (x >= xs.back()) return ys.back();
        const std::size_t i = cell(x);
        const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
        return ys[i] + t * (ys[i + 1] - ys[i]);
    }
};

// Uniform grid of n points on [lo, hi] with exact endpoints.
inline std::vector<double> uniform_grid(double lo, double hi, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
    g.front() = lo;
    g.back() = hi;
    return g;
}

}  // namespace revsim
