// Copyright (c) 2026 quaxis developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <unordered_map>
#include <vector>

#include "quaxis/errors.hpp"
#include "quaxis/vec2.hpp"

namespace quaxis {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussLegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

// Newton iteration on P_n, seeded with the Chebyshev-like estimate; the
// classic gauleg construction.
inline GaussLegendreRule build_gauss_legendre(int n) {
    GaussLegendreRule rule;
    rule.nodes.resize(static_cast<std::size_t>(n));
    rule.weights.resize(static_cast<std::size_t>(n));
    const int mid = (n + 1) / 2;
    for (int i = 0; i < mid; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 0; k < n; ++k) {
                double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
            }
            pp = n * (x * p0 - p1) / (x * x - 1.0);
            double dx = p0 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        rule.nodes[static_cast<std::size_t>(i)] = -x;
        rule.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        rule.weights[static_cast<std::size_t>(i)] = w;
        rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    return rule;
}

}  // namespace detail

inline const GaussLegendreRule& gauss_legendre_rule(int n) {
    thread_local std::unordered_map<int, GaussLegendreRule> cache;
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, detail::build_gauss_legendre(n)).first;
    return it->second;
}

/// Integrate a Vec2-valued function over [a, b] with an n-node rule.
template <typename F>
Vec2 gauss_legendre_integrate(F&& f, double a, double b, int n) {
    const auto& rule = gauss_legendre_rule(n);
    const double half = 0.5 * (b - a);
    const double midp = 0.5 * (b + a);
    Vec2 acc;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        Vec2 v = f(midp + half * rule.nodes[i]);
        acc += rule.weights[i] * v;
    }
    return half * acc;
}

/// Node-doubling driver: evaluate at n, 2n, 4n, ... until two successive
/// estimates agree componentwise within tol; throws quadrature_error with
/// the last two estimates if the cap is reached first.
template <typename F>
Vec2 integrate_with_doubling(F&& f, double a, double b, int n_start, double tol,
                             int n_cap) {
    int n = n_start < 2 ? 2 : n_start;
    Vec2 prev = gauss_legendre_integrate(f, a, b, n);
    while (2 * n <= n_cap) {
        n *= 2;
        Vec2 cur = gauss_legendre_integrate(f, a, b, n);
        if (std::fabs(cur.c - prev.c) < tol && std::fabs(cur.s - prev.s) < tol)
            return cur;
        if (2 * n > n_cap)
            throw quadrature_error("integrate_with_doubling: no convergence at node cap",
                                   prev.c, prev.s, cur.c, cur.s);
        prev = cur;
    }
    throw quadrature_error("integrate_with_doubling: node cap below first doubling",
                           prev.c, prev.s, prev.c, prev.s);
}

}  // namespace quaxis
