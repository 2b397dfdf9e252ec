// Copyright (c) 2026 quaxis developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "quaxis/half_int.hpp"
#include "quaxis/special.hpp"

namespace quaxis {

namespace detail {

// Magnitude-sorted Kahan summation.  The Wigner/CG k-sums alternate in sign
// and cancel badly at large j; summing small-to-large with compensation
// keeps the result at a few ulp of the exact value.
inline double sum_sorted_compensated(double* vals, std::size_t n) {
    std::sort(vals, vals + n,
              [](double a, double b) { return std::fabs(a) < std::fabs(b); });
    double sum = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double y = vals[i] - comp;
        double s = sum + y;
        comp = (s - sum) - y;
        sum = s;
    }
    return sum;
}

struct IntKey {
    std::uint64_t lo = 0, hi = 0;
    bool operator==(const IntKey&) const = default;
};

inline IntKey make_key(std::initializer_list<int> parts) {
    IntKey k;
    int shift = 0;
    std::uint64_t* word = &k.lo;
    for (int p : parts) {
        auto u = static_cast<std::uint64_t>(static_cast<std::uint16_t>(p));
        *word |= u << shift;
        shift += 16;
        if (shift == 64) {
            shift = 0;
            word = &k.hi;
        }
    }
    return k;
}

struct IntKeyHash {
    std::size_t operator()(const IntKey& k) const {
        auto mix = [](std::uint64_t z) {
            z += 0x9e3779b97f4a7c15ULL;
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            return z ^ (z >> 31);
        };
        return static_cast<std::size_t>(mix(k.lo) ^ (mix(k.hi) << 1));
    }
};

// Racah's closed form, all factorials in log space with the sign carried by
// (-1)^k.  Assumes the selection rules were already checked.
inline double clebsch_gordan_eval(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2,
                                  HalfInt J, HalfInt M) {
    auto fi = [](HalfInt h) { return h.twice() / 2; };  // exact whole values only
    const int a = fi(j1 + j2 - J);
    const int b = fi(j1 - j2 + J);
    const int c = fi(-j1 + j2 + J);
    const int d = fi(j1 + j2 + J) + 1;
    const double log_pref =
        0.5 * (std::log(J.twice() + 1.0) + log_factorial(a) + log_factorial(b) +
               log_factorial(c) - log_factorial(d) + log_factorial(fi(J + M)) +
               log_factorial(fi(J - M)) + log_factorial(fi(j1 + m1)) +
               log_factorial(fi(j1 - m1)) + log_factorial(fi(j2 + m2)) +
               log_factorial(fi(j2 - m2)));

    const int k_lo = std::max({0, fi(j2 - J - m1), fi(j1 + m2 - J)});
    const int k_hi = std::min({a, fi(j1 - m1), fi(j2 + m2)});
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
    for (int k = k_lo; k <= k_hi; ++k) {
        double lg = log_pref - log_factorial(k) - log_factorial(a - k) -
                    log_factorial(fi(j1 - m1) - k) - log_factorial(fi(j2 + m2) - k) -
                    log_factorial(fi(J - j2 + m1) + k) - log_factorial(fi(J - j1 - m2) + k);
        double t = std::exp(lg);
        terms.push_back((k & 1) ? -t : t);
    }
    return sum_sorted_compensated(terms.data(), terms.size());
}

}  // namespace detail

/// Clebsch-Gordan coefficient <j1 m1; j2 m2 | J M> in the Condon-Shortley
/// phase convention, memoized per thread.
///
/// Selection-rule violations (M != m1+m2, J outside the triangle range,
/// non-couplable parities) return 0; malformed quantum numbers throw.
inline double clebsch_gordan(HalfInt j1, HalfInt m1, HalfInt j2, HalfInt m2,
                             HalfInt J, HalfInt M) {
    require_magnetic(j1, m1, "clebsch_gordan");
    require_magnetic(j2, m2, "clebsch_gordan");
    require_magnetic(J, M, "clebsch_gordan");
    if (M != m1 + m2) return 0.0;
    if (J < abs(j1 - j2) || J > j1 + j2) return 0.0;
    if (!same_parity(j1 + j2, J)) return 0.0;

    thread_local std::unordered_map<detail::IntKey, double, detail::IntKeyHash> cache;
    auto key = detail::make_key(
        {j1.twice(), m1.twice(), j2.twice(), m2.twice(), J.twice(), M.twice()});
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    double v = detail::clebsch_gordan_eval(j1, m1, j2, m2, J, M);
    cache.emplace(key, v);
    return v;
}

/// Reduced Wigner rotation matrix element d^(j)_{m,mp} expanded once as a
/// signed polynomial in cos(beta/2) and sin(beta/2); evaluation sums the
/// terms sorted by magnitude with compensation.
class WignerDSeries {
  public:
    WignerDSeries(HalfInt j, HalfInt m, HalfInt mp) {
        require_magnetic(j, m, "wigner_d");
        require_magnetic(j, mp, "wigner_d");
        auto fi = [](HalfInt h) { return h.twice() / 2; };
        const double log_pref =
            0.5 * (log_factorial(fi(j + m)) + log_factorial(fi(j - m)) +
                   log_factorial(fi(j + mp)) + log_factorial(fi(j - mp)));
        const int d_mm = (m.twice() - mp.twice()) / 2;  // m - mp, whole
        const int s_lo = std::max(0, -d_mm);
        const int s_hi = std::min(fi(j + mp), fi(j - m));
        terms_.reserve(static_cast<std::size_t>(s_hi - s_lo + 1));
        for (int s = s_lo; s <= s_hi; ++s) {
            double lg = log_pref - log_factorial(fi(j + mp) - s) - log_factorial(s) -
                        log_factorial(d_mm + s) - log_factorial(fi(j - m) - s);
            Term t;
            t.coef = ((d_mm + s) & 1) ? -std::exp(lg) : std::exp(lg);
            t.cos_pow = j.twice() - d_mm - 2 * s;  // 2j + mp - m - 2s
            t.sin_pow = d_mm + 2 * s;              // m - mp + 2s
            terms_.push_back(t);
        }
    }

    /// Evaluate given ch = cos(beta/2), sh = sin(beta/2).
    double eval_half_angle(double ch, double sh) const {
        double buf_small[24];
        std::vector<double> buf_big;
        double* vals = buf_small;
        if (terms_.size() > 24) {
            buf_big.resize(terms_.size());
            vals = buf_big.data();
        }
        std::size_t n = 0;
        for (const auto& t : terms_)
            vals[n++] = t.coef * ipow(ch, t.cos_pow) * ipow(sh, t.sin_pow);
        return detail::sum_sorted_compensated(vals, n);
    }

    double eval(double beta) const {
        return eval_half_angle(std::cos(0.5 * beta), std::sin(0.5 * beta));
    }

  private:
    struct Term {
        double coef;
        int cos_pow;
        int sin_pow;
    };

    static double ipow(double x, int n) {
        double r = 1.0;
        while (n > 0) {
            if (n & 1) r *= x;
            x *= x;
            n >>= 1;
        }
        return r;
    }

    std::vector<Term> terms_;
};

namespace detail {

inline const WignerDSeries& wigner_series(HalfInt j, HalfInt m, HalfInt mp) {
    thread_local std::unordered_map<IntKey, WignerDSeries, IntKeyHash> cache;
    auto key = make_key({j.twice(), m.twice(), mp.twice()});
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, WignerDSeries(j, m, mp)).first;
    return it->second;
}

}  // namespace detail

/// d^(j)_{m,mp}(beta): matrix element of exp(-i beta J_y) between |j m> and
/// |j mp>.  d(0) is the identity; d^(1/2)_{1/2,1/2} = cos(beta/2).
inline double wigner_d(HalfInt j, HalfInt m, HalfInt mp, Angle beta) {
    return detail::wigner_series(j, m, mp).eval(beta.beta());
}

}  // namespace quaxis
