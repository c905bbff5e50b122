#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>

namespace winprob::optim {

template <std::size_t N>
struct NelderMeadResult {
    std::array<double, N> point{};
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

struct NelderMeadOptions {
    int max_iterations = 500;
    double initial_step = 0.1;
    // Stop when the objective reaches this value ...
    double target_value = 0.0;
    // ... or when the simplex collapses (spread in value and position).
    double value_tolerance = 1e-30;
    double point_tolerance = 1e-14;
};

// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2)
// minimizing f: R^N -> R.
template <std::size_t N, class F>
NelderMeadResult<N> nelder_mead(F&& f, const std::array<double, N>& start,
                                const NelderMeadOptions& opts = {})
{
    using Point = std::array<double, N>;
    std::array<Point, N + 1> simplex;
    std::array<double, N + 1> values;

    simplex[0] = start;
    for (std::size_t i = 0; i < N; ++i) {
        simplex[i + 1] = start;
        const double step = start[i] != 0.0 ? opts.initial_step * std::abs(start[i]) : opts.initial_step;
        simplex[i + 1][i] += step;
    }
    for (std::size_t i = 0; i <= N; ++i) values[i] = f(simplex[i]);

    std::array<std::size_t, N + 1> order;
    auto sort_simplex = [&] {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        auto s = simplex;
        auto v = values;
        for (std::size_t i = 0; i <= N; ++i) {
            simplex[i] = s[order[i]];
            values[i] = v[order[i]];
        }
    };

    auto combine = [](const Point& a, const Point& b, double t) {
        // a + t (b - a)
        Point r;
        for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + t * (b[i] - a[i]);
        return r;
    };

    NelderMeadResult<N> result;
    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        sort_simplex();
        if (values[0] <= opts.target_value) {
            result.converged = true;
            break;
        }
        double spread = 0.0;
        for (std::size_t i = 1; i <= N; ++i) {
            for (std::size_t j = 0; j < N; ++j) {
                spread = std::max(spread, std::abs(simplex[i][j] - simplex[0][j]) /
                                              std::max(1.0, std::abs(simplex[0][j])));
            }
        }
        if (values[N] - values[0] <= opts.value_tolerance && spread <= opts.point_tolerance) {
            result.converged = true;
            break;
        }

        Point centroid{};
        for (std::size_t i = 0; i < N; ++i) {
            for (std::size_t j = 0; j < N; ++j) centroid[j] += simplex[i][j] / N;
        }

        const Point reflected = combine(centroid, simplex[N], -1.0);
        const double fr = f(reflected);
        if (fr < values[0]) {
            const Point expanded = combine(centroid, simplex[N], -2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                simplex[N] = expanded;
                values[N] = fe;
            } else {
                simplex[N] = reflected;
                values[N] = fr;
            }
            continue;
        }
        if (fr < values[N - 1]) {
            simplex[N] = reflected;
            values[N] = fr;
            continue;
        }
        const bool outside = fr < values[N];
        const Point contracted = outside ? combine(centroid, reflected, 0.5)
                                         : combine(centroid, simplex[N], 0.5);
        const double fc = f(contracted);
        if (fc < std::min(fr, values[N])) {
            simplex[N] = contracted;
            values[N] = fc;
            continue;
        }
        for (std::size_t i = 1; i <= N; ++i) {
            simplex[i] = combine(simplex[0], simplex[i], 0.5);
            values[i] = f(simplex[i]);
        }
    }
    sort_simplex();
    result.point = simplex[0];
    result.value = values[0];
    result.iterations = iter;
    return result;
}

} // namespace winprob::optim
