// Copyright (c) 2026 quaxis developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <unordered_map>

#include "quaxis/angular.hpp"
#include "quaxis/half_int.hpp"
#include "quaxis/quadrature.hpp"
#include "quaxis/special.hpp"
#include "quaxis/vec2.hpp"

namespace quaxis {

/// Cosine-moment coefficient c^{j2}_m = m.
inline double c_coeff(HalfInt j2, HalfInt m) {
    require_magnetic(j2, m, "c_coeff");
    return m.value();
}

/// Sine-moment coefficient
/// s^{j2}_m = Gamma(3/2+j2+m) Gamma(3/2+j2-m) / [Gamma(1+j2+m) Gamma(1+j2-m)],
/// strictly positive and symmetric in m <-> -m.
inline double s_coeff(HalfInt j2, HalfInt m) {
    require_magnetic(j2, m, "s_coeff");
    const int tp = j2.twice() + m.twice();  // 2(j2+m), whole and >= 0
    const int tm = j2.twice() - m.twice();
    return std::exp(log_gamma_half(3 + tp) + log_gamma_half(3 + tm) -
                    log_gamma_half(2 + tp) - log_gamma_half(2 + tm));
}

/// eta^{j2}_{j m} = <j1 j1; j2 m-j1 | j m>^2 as a pure ratio of factorials,
/// evaluated in log space.  Returns 0 whenever the formal indices fall
/// outside the selection rules (out-of-triangle j, invalid m - j1), so sums
/// may iterate full formal ranges.
inline double eta(HalfInt j1, HalfInt j2, HalfInt j, HalfInt m) {
    if (!same_parity(j1 + j2, j) || !same_parity(j, m))
        throw std::domain_error("eta: inconsistent quantum-number parities");
    if (j1.twice() < 1 || j2.twice() < 0 || j.twice() < 0) {
        if (j.twice() < 0) return 0.0;
        throw std::domain_error("eta: negative spin");
    }
    if (j < abs(j1 - j2) || j > j1 + j2) return 0.0;
    if (abs(m) > j) return 0.0;
    if (!valid_magnetic(j2, m - j1)) return 0.0;

    auto fi = [](HalfInt h) { return h.twice() / 2; };
    double lg = log_factorial(fi(j1 + j1)) + log_factorial(fi(j2 - j1 + j)) -
                log_factorial(fi(j1 - j2 + j)) - log_factorial(fi(j1 + j2 - j)) -
                log_factorial(fi(j1 + j2 + j) + 1) + log_factorial(fi(j2 + j1 - m)) +
                log_factorial(fi(j + m)) - log_factorial(fi(j2 - j1 + m)) -
                log_factorial(fi(j - m));
    return (j.twice() + 1.0) * std::exp(lg);
}

namespace detail {

constexpr double kCsTolerance = 1e-12;
constexpr int kCsNodeCap = 1 << 14;

}  // namespace detail

/// The pair (C^{J'J}_{kM}, S^{J'J}_{kM}): first and second trigonometric
/// moments of d^(J')_{kM}(beta) d^(J)_{kM}(beta) under the normalized
/// measure sin(beta) d(beta) / 2 on [0, pi].
///
/// Evaluated by Gauss-Legendre in beta with node doubling to 1e-12; the
/// integrand is a trigonometric polynomial of bounded degree, so the node
/// cap only ever flags a bug.  Results are memoized per thread.
inline Vec2 cs_integral(HalfInt Jp, HalfInt J, HalfInt k, HalfInt M) {
    require_magnetic(Jp, k, "cs_integral");
    require_magnetic(J, k, "cs_integral");
    require_magnetic(Jp, M, "cs_integral");
    require_magnetic(J, M, "cs_integral");

    thread_local std::unordered_map<detail::IntKey, Vec2, detail::IntKeyHash> cache;
    auto key = detail::make_key({Jp.twice(), J.twice(), k.twice(), M.twice()});
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    const auto& dp = detail::wigner_series(Jp, k, M);
    const auto& dj = detail::wigner_series(J, k, M);
    auto integrand = [&](double beta) -> Vec2 {
        double ch = std::cos(0.5 * beta);
        double sh = std::sin(0.5 * beta);
        double dd = dp.eval_half_angle(ch, sh) * dj.eval_half_angle(ch, sh);
        double sb = 2.0 * sh * ch;        // sin(beta)
        double cb = ch * ch - sh * sh;    // cos(beta)
        return {0.5 * sb * cb * dd, 0.5 * sb * sb * dd};
    };
    int n_start = std::max(16, 2 * (J.twice() + Jp.twice()));
    Vec2 v = integrate_with_doubling(integrand, 0.0, M_PI, n_start,
                                     detail::kCsTolerance, detail::kCsNodeCap);
    cache.emplace(key, v);
    return v;
}

}  // namespace quaxis
