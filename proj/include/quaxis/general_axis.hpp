// Copyright (c) 2026 quaxis developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <vector>

#include "quaxis/half_int.hpp"
#include "quaxis/merit.hpp"
#include "quaxis/parallel.hpp"
#include "quaxis/vec2.hpp"

namespace quaxis {

/// A generalized quantum axis on N spins: an eigenstate of n.S with
/// eigenvalue M, i.e. a combination sum_J a_J |J M> with real a_J >= 0
/// (phases can always be absorbed into the measurement).
class GeneralAxis {
  public:
    GeneralAxis(int n_spins, HalfInt M, std::vector<double> amps)
        : n_spins_(n_spins), m_(M), amps_(std::move(amps)) {
        if (n_spins_ < 1) throw std::domain_error("GeneralAxis: need at least one spin");
        HalfInt jmax = HalfInt::from_twice(n_spins_);
        if (!valid_magnetic(jmax, m_))
            throw std::domain_error("GeneralAxis: M is not a magnetic number of N/2");
        if (static_cast<int>(amps_.size()) != dim())
            throw std::domain_error("GeneralAxis: need one amplitude per J in |M|..N/2");
        double norm2 = 0.0;
        for (double a : amps_) {
            if (!(a >= 0.0)) throw std::domain_error("GeneralAxis: amplitudes must be >= 0");
            norm2 += a * a;
        }
        if (std::fabs(norm2 - 1.0) > 1e-12)
            throw std::domain_error("GeneralAxis: amplitudes must be normalized");
    }

    /// Single-J axis (a_J = 1): reduces to the parallel-spin case when
    /// J = M = N/2.
    static GeneralAxis single(int n_spins, HalfInt M, HalfInt J) {
        HalfInt j_lo = abs(M);
        std::vector<double> amps(
            static_cast<std::size_t>((n_spins - j_lo.twice()) / 2 + 1), 0.0);
        int idx = (J.twice() - j_lo.twice()) / 2;
        if (idx < 0 || idx >= static_cast<int>(amps.size()))
            throw std::domain_error("GeneralAxis::single: J outside |M|..N/2");
        amps[static_cast<std::size_t>(idx)] = 1.0;
        return {n_spins, M, std::move(amps)};
    }

    /// Two-spin M = 0 axis with triplet fraction x = a_1^2.
    static GeneralAxis two_spin(double x) {
        if (!(x >= 0.0 && x <= 1.0))
            throw std::domain_error("GeneralAxis::two_spin: x outside [0, 1]");
        return {2, HalfInt(0), {std::sqrt(1.0 - x), std::sqrt(x)}};
    }

    int n_spins() const { return n_spins_; }
    HalfInt magnetic_number() const { return m_; }
    HalfInt j_lo() const { return abs(m_); }
    HalfInt j_hi() const { return HalfInt::from_twice(n_spins_); }
    /// Number of J values |M|, |M|+1, ..., N/2.
    int dim() const { return (n_spins_ - abs(m_).twice()) / 2 + 1; }

    HalfInt j_at(int index) const { return HalfInt::from_twice(j_lo().twice() + 2 * index); }

    double amp(HalfInt J) const {
        int idx = (J.twice() - j_lo().twice()) / 2;
        if (idx < 0 || idx >= dim() || !same_parity(J, j_lo())) return 0.0;
        return amps_[static_cast<std::size_t>(idx)];
    }

  private:
    int n_spins_;
    HalfInt m_;
    std::vector<double> amps_;
};

/// Outcome label range of the rotationally invariant measurement on
/// (reference j1) x (axis): total spins j reachable from some J in the
/// axis decomposition.
inline std::pair<HalfInt, HalfInt> outcome_range(HalfInt j1, const GeneralAxis& axis) {
    HalfInt lo = j1 + axis.j_hi();
    for (int i = 0; i < axis.dim(); ++i) lo = min(lo, abs(j1 - axis.j_at(i)));
    return {lo, j1 + axis.j_hi()};
}

/// The coefficient matrices xi^{J'J}_{r j} of a rotationally invariant
/// POVM: one real symmetric matrix (rows/columns indexed by J) per outcome
/// (r, j).  Positivity of each matrix and the completeness sum
/// sum_r xi_{r j} = delta^{J'J} [triangle(j1, J, j)] make the family a
/// valid measurement.
class XiFamily {
  public:
    using Matrix = Eigen::MatrixXd;

    XiFamily(HalfInt j_first, int n_blocks, HalfInt J_first, int j_dim)
        : j_first_(j_first), big_j_first_(J_first), j_dim_(j_dim) {
        if (n_blocks < 1 || j_dim < 1)
            throw std::domain_error("XiFamily: empty outcome structure");
        blocks_.resize(static_cast<std::size_t>(n_blocks));
    }

    int n_blocks() const { return static_cast<int>(blocks_.size()); }
    HalfInt j_at(int block) const {
        return HalfInt::from_twice(j_first_.twice() + 2 * block);
    }
    int block_of(HalfInt j) const {
        int b = (j.twice() - j_first_.twice()) / 2;
        if (b < 0 || b >= n_blocks() || !same_parity(j, j_first_))
            throw std::domain_error("XiFamily: no outcome block for j=" + j.str());
        return b;
    }
    int j_dim() const { return j_dim_; }
    HalfInt big_j_at(int index) const {
        return HalfInt::from_twice(big_j_first_.twice() + 2 * index);
    }

    int n_outcomes(int block) const {
        return static_cast<int>(blocks_[static_cast<std::size_t>(block)].size());
    }
    const Matrix& matrix(int block, int r) const {
        return blocks_[static_cast<std::size_t>(block)][static_cast<std::size_t>(r)];
    }
    void add_outcome(int block, Matrix m) {
        if (m.rows() != j_dim_ || m.cols() != j_dim_)
            throw std::domain_error("XiFamily: matrix dimension mismatch");
        blocks_[static_cast<std::size_t>(block)].push_back(std::move(m));
    }

    /// Trivial complete family: one outcome per j with
    /// xi = delta^{J'J} [triangle(j1, J, j)].
    static XiFamily identity(HalfInt j1, const GeneralAxis& axis) {
        auto [lo, hi] = outcome_range(j1, axis);
        int nb = (hi.twice() - lo.twice()) / 2 + 1;
        XiFamily fam(lo, nb, axis.j_lo(), axis.dim());
        for (int b = 0; b < nb; ++b) {
            Matrix m = Matrix::Zero(axis.dim(), axis.dim());
            for (int i = 0; i < axis.dim(); ++i) {
                HalfInt J = axis.j_at(i);
                if (fam.j_at(b) >= abs(j1 - J) && fam.j_at(b) <= j1 + J) m(i, i) = 1.0;
            }
            fam.add_outcome(b, std::move(m));
        }
        return fam;
    }

    /// The bound-attaining two-spin family: at j = j1 the two outcomes
    /// xi^{00} = xi^{11} = 1/2, xi^{01} = xi^{10} = (-1)^r / 2; at
    /// j = j1 +- 1 the triplet weight 1/2 per outcome.
    static XiFamily two_spin_attaining(HalfInt j1) {
        GeneralAxis axis = GeneralAxis::two_spin(0.5);  // structure only
        auto [lo, hi] = outcome_range(j1, axis);
        int nb = (hi.twice() - lo.twice()) / 2 + 1;
        XiFamily fam(lo, nb, axis.j_lo(), axis.dim());
        for (int b = 0; b < nb; ++b) {
            HalfInt j = fam.j_at(b);
            for (int r = 1; r <= 2; ++r) {
                Matrix m = Matrix::Zero(2, 2);
                if (j == j1) {
                    double sign = (r % 2 == 0) ? 0.5 : -0.5;
                    m << 0.5, sign, sign, 0.5;
                } else {
                    m(1, 1) = 0.5;  // only the J = J' = 1 sector couples
                }
                fam.add_outcome(b, std::move(m));
            }
        }
        return fam;
    }

  private:
    HalfInt j_first_;
    HalfInt big_j_first_;
    int j_dim_;
    std::vector<std::vector<Matrix>> blocks_;
};

struct XiDiagnostics {
    double max_psd_violation = 0.0;        // most negative eigenvalue, magnitude
    double max_completeness_residual = 0.0;
    bool pass = false;
};

/// Check positivity and completeness of a xi family against the structure
/// implied by (j1, axis).  Throws on structural mismatch; tolerances are
/// 1e-10 on both the most negative eigenvalue and the completeness
/// residual.
inline XiDiagnostics validate_xi(const XiFamily& fam, HalfInt j1,
                                 const GeneralAxis& axis) {
    auto [lo, hi] = outcome_range(j1, axis);
    if (fam.j_at(0) != lo || fam.j_at(fam.n_blocks() - 1) != hi ||
        fam.j_dim() != axis.dim() || fam.big_j_at(0) != axis.j_lo())
        throw std::domain_error("validate_xi: family structure does not match axis");

    XiDiagnostics diag;
    for (int b = 0; b < fam.n_blocks(); ++b) {
        if (fam.n_outcomes(b) == 0)
            throw std::domain_error("validate_xi: block without outcomes");
        XiFamily::Matrix sum = XiFamily::Matrix::Zero(axis.dim(), axis.dim());
        for (int r = 0; r < fam.n_outcomes(b); ++r) {
            const auto& m = fam.matrix(b, r);
            if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12)
                throw std::domain_error("validate_xi: xi matrix is not symmetric");
            Eigen::SelfAdjointEigenSolver<XiFamily::Matrix> es(m,
                                                               Eigen::EigenvaluesOnly);
            double lam_min = es.eigenvalues().minCoeff();
            if (-lam_min > diag.max_psd_violation) diag.max_psd_violation = -lam_min;
            sum += m;
        }
        for (int i = 0; i < axis.dim(); ++i) {
            HalfInt J = axis.j_at(i);
            bool allowed = fam.j_at(b) >= abs(j1 - J) && fam.j_at(b) <= j1 + J;
            sum(i, i) -= allowed ? 1.0 : 0.0;
        }
        double res = sum.cwiseAbs().maxCoeff();
        if (res > diag.max_completeness_residual) diag.max_completeness_residual = res;
    }
    diag.pass =
        diag.max_psd_violation < 1e-10 && diag.max_completeness_residual < 1e-10;
    return diag;
}

/// Estimator vector of outcome (r, j) for a generalized axis:
/// V^M_{rj} = sum_{J'J k} a_{J'} a_J xi^{J'J}_{rj}
///            sqrt(eta^{J'}_{j,k+j1} eta^{J}_{j,k+j1}) (C, S)^{J'J}_{kM}.
inline Vec2 v_vector_general(HalfInt j1, const GeneralAxis& axis, const XiFamily& fam,
                             HalfInt j, int r) {
    const int b = fam.block_of(j);
    if (r < 0 || r >= fam.n_outcomes(b))
        throw std::domain_error("v_vector_general: outcome index out of range");
    const auto& xi = fam.matrix(b, r);
    const HalfInt M = axis.magnetic_number();
    Vec2 v;
    for (int ip = 0; ip < axis.dim(); ++ip) {
        HalfInt Jp = axis.j_at(ip);
        double ap = axis.amp(Jp);
        if (ap == 0.0) continue;
        for (int ij = 0; ij < axis.dim(); ++ij) {
            HalfInt J = axis.j_at(ij);
            double w = ap * axis.amp(J) * xi(ip, ij);
            if (w == 0.0) continue;
            HalfInt k_max = min(Jp, J);
            for (int tk = -k_max.twice(); tk <= k_max.twice(); tk += 2) {
                HalfInt k = HalfInt::from_twice(tk);
                if (!same_parity(Jp, k)) continue;
                double e1 = eta(j1, Jp, j, k + j1);
                if (e1 == 0.0) continue;
                double e2 = eta(j1, J, j, k + j1);
                if (e2 == 0.0) continue;
                v += (w * std::sqrt(e1 * e2)) * cs_integral(Jp, J, k, M);
            }
        }
    }
    return v;
}

/// Average figure of merit sum_{r j} |V^M_{rj}| of the family.
inline double delta_general(HalfInt j1, const GeneralAxis& axis, const XiFamily& fam) {
    double sum = 0.0;
    for (int b = 0; b < fam.n_blocks(); ++b)
        for (int r = 0; r < fam.n_outcomes(b); ++r)
            sum += v_vector_general(j1, axis, fam, fam.j_at(b), r).norm();
    return sum;
}

/// Closed-form merit of a two-spin M = 0 axis with triplet fraction x
/// against a j1 parallel-spin reference.
struct TwoSpinSolution {
    double x;
    double a;
    double b;
    double delta;
};

namespace detail {

inline double two_spin_merit(double a, double b, double x) {
    double one_ax = 1.0 - a * x;
    return 0.25 * M_PI * a * x +
           std::sqrt(b * x * (1.0 - x) + M_PI * M_PI / 16.0 * one_ax * one_ax);
}

// d/dx of two_spin_merit; the stationarity bracket for the maximum.
inline double two_spin_merit_slope(double a, double b, double x) {
    double one_ax = 1.0 - a * x;
    double root = std::sqrt(b * x * (1.0 - x) + M_PI * M_PI / 16.0 * one_ax * one_ax);
    double p = b * (1.0 - 2.0 * x) - M_PI * M_PI * a / 8.0 * one_ax;
    return 0.25 * M_PI * a + 0.5 * p / root;
}

struct TwoSpinCoeffs {
    double a, b;
};

inline TwoSpinCoeffs two_spin_coeffs(HalfInt j1) {
    if (j1.twice() < 1) throw std::domain_error("two-spin solution needs j1 >= 1/2");
    double jv = j1.value();
    return {(6.0 * jv + 5.0) / (8.0 * (jv + 1.0)), 4.0 * jv / (9.0 * (jv + 1.0))};
}

}  // namespace detail

inline TwoSpinSolution delta_two_spin(HalfInt j1, double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("delta_two_spin: x outside [0, 1]");
    auto [a, b] = detail::two_spin_coeffs(j1);
    return {x, a, b, detail::two_spin_merit(a, b, x)};
}

struct TwoSpinOptimum {
    double x_star;
    double delta_max;
};

namespace detail {

// Maximum of the two-spin merit over x: the stationarity condition squares
// to a quadratic in x whose admissible root seeds a bisection polish on the
// slope; the returned maximum value comes from the independent closed form,
// which the stationary value must reproduce.
inline TwoSpinOptimum two_spin_maximum(double a, double b) {
    const double p2 = M_PI * M_PI;
    const double u = b - p2 * a / 8.0;
    const double v = -2.0 * b + p2 * a * a / 8.0;
    const double q_xx = -p2 * a * a * b / 4.0 + p2 * p2 * a * a * a * a / 64.0;
    const double q_x = p2 * a * a * b / 4.0 - p2 * p2 * a * a * a / 32.0;
    const double q_c = p2 * p2 * a * a / 64.0;
    const double A2 = v * v - q_xx;
    const double A1 = 2.0 * u * v - q_x;
    const double A0 = u * u - q_c;

    double x_hat = 0.5;
    const double disc = A1 * A1 - 4.0 * A2 * A0;
    if (disc >= 0.0 && A2 != 0.0) {
        double sq = std::sqrt(disc);
        double q = -0.5 * (A1 + (A1 >= 0.0 ? sq : -sq));
        for (double root : {q / A2, A0 / q}) {
            if (root >= 0.0 && root <= 1.0 && u + v * root <= 1e-9) x_hat = root;
        }
    }

    // polish: the slope decreases through zero at the maximum
    double lo = std::max(0.0, x_hat - 1e-3), hi = std::min(1.0, x_hat + 1e-3);
    while (two_spin_merit_slope(a, b, lo) < 0.0 && lo > 0.0)
        lo = std::max(0.0, lo - 0.1);
    while (two_spin_merit_slope(a, b, hi) > 0.0 && hi < 1.0) hi = std::min(1.0, hi + 0.1);
    for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
        double mid = 0.5 * (lo + hi);
        (two_spin_merit_slope(a, b, mid) > 0.0 ? lo : hi) = mid;
    }
    double x_star = 0.5 * (lo + hi);

    double closed = (a * M_PI * (8.0 * b - a * p2) +
                     16.0 * b * std::sqrt(4.0 * b + (1.0 - a) * p2)) /
                    (4.0 * (16.0 * b - a * a * p2));
    if (std::fabs(two_spin_merit(a, b, x_star) - closed) > 1e-10)
        throw numerical_error("two_spin_maximum: stationary point disagrees with the "
                              "closed-form maximum");
    return {x_star, closed};
}

}  // namespace detail

inline TwoSpinOptimum delta_two_spin_max(HalfInt j1) {
    auto [a, b] = detail::two_spin_coeffs(j1);
    return detail::two_spin_maximum(a, b);
}

/// j1 -> infinity limit of the two-spin merit (a = 3/4, b = 4/9).
inline double delta_two_spin_classical(double x) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("delta_two_spin_classical: x outside [0, 1]");
    return detail::two_spin_merit(0.75, 4.0 / 9.0, x);
}

inline TwoSpinOptimum delta_two_spin_classical_max() {
    return detail::two_spin_maximum(0.75, 4.0 / 9.0);
}

/// Dephasing argument for N2 = 2: a mixture over magnetic numbers
/// M in {-1, 0, +1} can never beat the best pure-M axis.
struct ConvexityVerdict {
    double mixture_value;
    double max_component;
    bool holds;
};

inline ConvexityVerdict convexity_check(HalfInt j1, const std::array<double, 3>& p_m) {
    double sum = 0.0;
    for (double p : p_m) {
        if (!(p >= 0.0)) throw std::domain_error("convexity_check: negative weight");
        sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-12)
        throw std::domain_error("convexity_check: weights must sum to 1");
    double d_pm = delta_parallel(j1, HalfInt(1));      // M = +-1
    double d_0 = delta_two_spin_max(j1).delta_max;     // optimal M = 0
    ConvexityVerdict v;
    v.mixture_value = p_m[0] * d_pm + p_m[1] * d_0 + p_m[2] * d_pm;
    v.max_component = std::max(d_pm, d_0);
    v.holds = v.mixture_value <= v.max_component + 1e-12;
    return v;
}

}  // namespace quaxis
