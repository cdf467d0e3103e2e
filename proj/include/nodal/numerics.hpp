#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <exception>
#include <numbers>
#include <span>
#include <thread>
#include <vector>

namespace nodal {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Symmetric 2x2 matrix [[xx, xy], [xy, yy]].
struct Sym2 {
    double xx = 0.0;
    double xy = 0.0;
    double yy = 0.0;

    double trace() const { return xx + yy; }
    double frobenius_sq() const { return xx * xx + 2.0 * xy * xy + yy * yy; }

    /// Largest absolute eigenvalue.
    double operator_norm() const {
        const double mean = 0.5 * (xx + yy);
        const double half_diff = 0.5 * (xx - yy);
        return std::abs(mean) + std::hypot(half_diff, xy);
    }

    /// Quadratic form (H w, w).
    double quadratic(std::array<double, 2> w) const {
        return xx * w[0] * w[0] + 2.0 * xy * w[0] * w[1] + yy * w[1] * w[1];
    }
};

/// Pairwise (cascade) summation. Fixed reduction order for any given length.
inline double pairwise_sum(std::span<const double> values) {
    constexpr std::size_t block = 32;
    if (values.size() <= block) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

/// Gauss-Legendre nodes and weights on [-1, 1], nodes in descending order.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline GaussLegendre gauss_legendre(std::size_t n) {
    const double nn = static_cast<double>(n);
    // (P_n(x), P_n'(x)) by the three-term recurrence
    const auto legendre = [n, nn](double x) {
        double p0 = 1.0;
        double p1 = x;
        for (std::size_t k = 2; k <= n; ++k) {
            const double kk = static_cast<double>(k);
            const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
            p0 = p1;
            p1 = p2;
        }
        return std::array<double, 2>{p1, nn * (x * p1 - p0) / (x * x - 1.0)};
    };

    GaussLegendre rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(pi * (static_cast<double>(i) + 0.75) / (nn + 0.5));
        for (int iter = 0; iter < 100; ++iter) {
            const auto [p, dp] = legendre(x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = legendre(x)[1];
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.nodes[i] = x;
        rule.nodes[n - 1 - i] = -x;
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
    return rule;
}

/// Runs body(i) for i in [0, count) on a few worker threads. Each index is
/// visited exactly once; callers write results into per-index slots.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t workers = std::min<std::size_t>(hw, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> failures(workers);
    {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < count; i += workers) body(i);
                } catch (...) {
                    failures[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& f : failures)
        if (f) std::rethrow_exception(f);
}

/// Wrap a coordinate difference to (-period/2, period/2].
inline double wrap_difference(double d, double period) {
    d = std::fmod(d, period);
    if (d > 0.5 * period) d -= period;
    if (d <= -0.5 * period) d += period;
    return d;
}

} // namespace nodal
