// Copyright (c) 2026 quaxis developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <compare>
#include <stdexcept>
#include <string>

namespace quaxis {

/// Exact half-integer angular-momentum label, stored as twice its value.
///
/// All quantum numbers (j, m, J, M, ...) live here so that half-integers
/// compare exactly; no floating-point quantum numbers anywhere.
class HalfInt {
  public:
    constexpr HalfInt() = default;
    constexpr HalfInt(int whole) : twice_(2 * whole) {}

    static constexpr HalfInt from_twice(int t) {
        HalfInt h;
        h.twice_ = t;
        return h;
    }

    constexpr int twice() const { return twice_; }
    constexpr double value() const { return 0.5 * twice_; }
    constexpr bool is_integer() const { return (twice_ & 1) == 0; }

    constexpr HalfInt operator-() const { return from_twice(-twice_); }
    friend constexpr HalfInt operator+(HalfInt a, HalfInt b) {
        return from_twice(a.twice_ + b.twice_);
    }
    friend constexpr HalfInt operator-(HalfInt a, HalfInt b) {
        return from_twice(a.twice_ - b.twice_);
    }
    constexpr HalfInt& operator+=(HalfInt o) {
        twice_ += o.twice_;
        return *this;
    }
    constexpr HalfInt& operator-=(HalfInt o) {
        twice_ -= o.twice_;
        return *this;
    }

    friend constexpr auto operator<=>(HalfInt, HalfInt) = default;

    /// "3/2", "-1/2", "2", ...
    std::string str() const {
        if (is_integer()) return std::to_string(twice_ / 2);
        return std::to_string(twice_) + "/2";
    }

  private:
    int twice_ = 0;
};

constexpr HalfInt abs(HalfInt h) {
    return h.twice() < 0 ? -h : h;
}
constexpr HalfInt min(HalfInt a, HalfInt b) {
    return a < b ? a : b;
}
constexpr HalfInt max(HalfInt a, HalfInt b) {
    return a < b ? b : a;
}

/// True when a - b is a whole integer (twice-values share parity).
constexpr bool same_parity(HalfInt a, HalfInt b) {
    return ((a.twice() - b.twice()) & 1) == 0;
}

/// True when m is a magnetic number of spin j: |m| <= j and j - m integer.
constexpr bool valid_magnetic(HalfInt j, HalfInt m) {
    return abs(m) <= j && same_parity(j, m);
}

inline void require_magnetic(HalfInt j, HalfInt m, const char* what) {
    if (!valid_magnetic(j, m))
        throw std::domain_error(std::string(what) + ": m=" + m.str() +
                                " is not a magnetic number of j=" + j.str());
}

/// Polar angle in radians, restricted to [0, pi].
class Angle {
  public:
    explicit Angle(double beta) : beta_(beta) {
        if (!(beta >= 0.0 && beta <= 3.14159265358979323847))
            throw std::domain_error("Angle: beta outside [0, pi]");
    }
    double beta() const { return beta_; }

  private:
    double beta_;
};

}  // namespace quaxis
