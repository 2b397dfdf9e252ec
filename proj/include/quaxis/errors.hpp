// Copyright (c) 2026 quaxis developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace quaxis {

/// Raised when the node-doubling quadrature hits its node cap without the
/// requested tolerance; carries the last two estimates for diagnosis.
class quadrature_error : public std::runtime_error {
  public:
    quadrature_error(const std::string& msg, double prev_c, double prev_s,
                     double last_c, double last_s)
        : std::runtime_error(msg + " (previous=(" + std::to_string(prev_c) + ", " +
                             std::to_string(prev_s) + "), last=(" + std::to_string(last_c) +
                             ", " + std::to_string(last_s) + "))"),
          previous_c(prev_c),
          previous_s(prev_s),
          last_c(last_c),
          last_s(last_s) {}

    double previous_c, previous_s;
    double last_c, last_s;
};

/// Internal-consistency failure in a numerical routine (probabilities not
/// normalized, PSD violation in a sampled protocol, ...).
class numerical_error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

}  // namespace quaxis
