#pragma once

// One-dimensional maximization on a uniform grid with a Brent polish.

#include <cstddef>
#include <limits>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "spinbus/parallel.hpp"

namespace spinbus {

struct ScalarMax {
    double x = 0.0;
    double value = 0.0;
};

/// Uniform grid lo + (hi - lo) k / (steps - 1), k in [0, steps).
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t steps) {
    std::vector<double> g(steps);
    if (steps == 1) {
        g[0] = lo;
        return g;
    }
    for (std::size_t k = 0; k < steps; ++k) {
        g[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps - 1);
    }
    return g;
}

/// Values closer than this count as equal when picking a maximum.
inline constexpr double kTieTolerance = 1e-12;

/// First grid index holding the maximum; near-ties resolve to the smallest index.
inline std::size_t argmax_first(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (v[k] > v[best] + kTieTolerance) best = k;
    }
    return best;
}

/// Grid search over [lo, hi] followed by Brent's method inside the
/// neighbouring cells of the best grid point. The polished point replaces the
/// grid point only if it is strictly better.
template <class Fn>
ScalarMax maximize_scalar(Fn&& fn, double lo, double hi, std::size_t steps) {
    const auto grid = uniform_grid(lo, hi, steps);
    std::vector<double> values(grid.size());
    parallel_for(grid.size(), [&](std::size_t k) { values[k] = fn(grid[k]); });
    const std::size_t k = argmax_first(values);
    ScalarMax best{grid[k], values[k]};
    if (grid.size() < 2) return best;

    const double a = grid[k == 0 ? 0 : k - 1];
    const double b = grid[k + 1 == grid.size() ? k : k + 1];
    auto neg = [&](double x) { return -fn(x); };
    const auto [x, fx] = boost::math::tools::brent_find_minima(neg, a, b, std::numeric_limits<double>::digits / 2);
    if (-fx > best.value) best = {x, -fx};
    return best;
}

}  // namespace spinbus
