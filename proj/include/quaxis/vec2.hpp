// Copyright (c) 2026 quaxis developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>

namespace quaxis {

/// 2-dimensional real vector with a cos-component and a sin-component.
/// Houses w = (cos beta, sin beta), the estimator vectors V, and (C, S)
/// integral pairs.
struct Vec2 {
    double c = 0.0;
    double s = 0.0;

    double norm() const { return std::hypot(c, s); }

    /// atan2(s, c); lands in [0, pi] whenever s >= 0.
    double angle() const { return std::atan2(s, c); }

    Vec2& operator+=(const Vec2& o) {
        c += o.c;
        s += o.s;
        return *this;
    }
    friend Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend Vec2 operator*(double k, const Vec2& v) { return {k * v.c, k * v.s}; }
    friend Vec2 operator*(const Vec2& v, double k) { return {k * v.c, k * v.s}; }
    Vec2& operator*=(double k) {
        c *= k;
        s *= k;
        return *this;
    }

    double dot(const Vec2& o) const { return c * o.c + s * o.s; }
};

}  // namespace quaxis
