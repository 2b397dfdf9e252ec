// Copyright (c) 2026 quaxis developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace quaxis {

namespace detail {

// ln Gamma at half-integer steps, built by exact recursion
// lnGamma(x) = lnGamma(x-1) + ln(x-1) from lnGamma(1/2) = ln sqrt(pi) and
// lnGamma(1) = 0.  Each parity chain carries its own Kahan compensation so
// the table stays accurate to a few ulp out to arguments of several
// thousand.  One table per thread; readers never see a partial update.
class LogGammaTable {
  public:
    double at(int twice_x) {
        if (twice_x >= static_cast<int>(val_.size())) grow(twice_x);
        return val_[static_cast<std::size_t>(twice_x)];
    }

  private:
    void grow(int twice_x) {
        int want = twice_x + 1;
        if (want < 64) want = 64;
        if (val_.empty()) {
            val_.assign(3, 0.0);
            val_[1] = 0.57236494292470008707171367567652935582;  // ln sqrt(pi)
            val_[2] = 0.0;
            sum_[1] = val_[1];
            sum_[0] = val_[2];
        }
        while (static_cast<int>(val_.size()) < want) {
            int t = static_cast<int>(val_.size());  // next twice-value
            int p = t & 1;
            double term = std::log(0.5 * (t - 2));
            double y = term - comp_[p];
            double s = sum_[p] + y;
            comp_[p] = (s - sum_[p]) - y;
            sum_[p] = s;
            val_.push_back(sum_[p]);
        }
    }

    std::vector<double> val_;
    double sum_[2] = {0.0, 0.0};
    double comp_[2] = {0.0, 0.0};
};

inline LogGammaTable& log_gamma_table() {
    thread_local LogGammaTable table;
    return table;
}

}  // namespace detail

/// ln Gamma(x) for x = twice_x / 2 > 0 at half-integer resolution.
inline double log_gamma_half(int twice_x) {
    if (twice_x < 1)
        throw std::domain_error("log_gamma_half: argument must be positive");
    return detail::log_gamma_table().at(twice_x);
}

/// ln n!  (n >= 0)
inline double log_factorial(int n) {
    if (n < 0) throw std::domain_error("log_factorial: negative argument");
    return detail::log_gamma_table().at(2 * n + 2);
}

}  // namespace quaxis
