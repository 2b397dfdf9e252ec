// Copyright (c) 2026 quaxis developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <vector>

#include "quaxis/angular.hpp"
#include "quaxis/half_int.hpp"
#include "quaxis/merit.hpp"
#include "quaxis/vec2.hpp"

namespace quaxis {

/// A pair of quantum axes made of N_i = 2 j_i parallel spins each.
/// Internally canonicalized to j2 <= j1; all public results are symmetric
/// under exchanging the two axes.
class ParallelScenario {
  public:
    ParallelScenario(HalfInt j1, HalfInt j2) : j1_(max(j1, j2)), j2_(min(j1, j2)) {
        if (j2_.twice() < 1)
            throw std::domain_error("ParallelScenario: spins must be >= 1/2");
    }

    static ParallelScenario from_spin_counts(int n1, int n2) {
        if (n1 < 1 || n2 < 1)
            throw std::domain_error("ParallelScenario: spin counts must be >= 1");
        return {HalfInt::from_twice(n1), HalfInt::from_twice(n2)};
    }

    HalfInt j1() const { return j1_; }
    HalfInt j2() const { return j2_; }
    HalfInt j_min() const { return j1_ - j2_; }
    HalfInt j_max() const { return j1_ + j2_; }

  private:
    HalfInt j1_, j2_;
};

/// One measurement outcome with its estimator data: the vector V, its
/// length (the outcome's weight in Delta-bar) and the optimal estimate
/// theta_hat = atan2(V.s, V.c).
struct OutcomeEstimate {
    HalfInt label;  // total spin j (parallel case) or projection m (classical)
    Vec2 v;
    double weight = 0.0;
    double theta_hat = 0.0;
};

struct EstimatorTable {
    std::vector<OutcomeEstimate> outcomes;
    double delta = 0.0;
    bool has_degenerate = false;  // some |V| < 1e-15 was replaced by the prior mean
};

namespace detail {

constexpr double kDegenerateWeight = 1e-15;

inline OutcomeEstimate make_estimate(HalfInt label, Vec2 v, bool* degenerate) {
    OutcomeEstimate e;
    e.label = label;
    e.v = v;
    e.weight = v.norm();
    if (e.weight < kDegenerateWeight) {
        // any angle is optimal at zero weight; pi/2 is the prior mean of
        // beta under the cos-uniform measure
        e.theta_hat = 0.5 * M_PI;
        e.weight = 0.0;
        if (degenerate) *degenerate = true;
    } else {
        e.theta_hat = v.angle();
    }
    return e;
}

}  // namespace detail

/// Probability of total-spin outcome j at relative angle beta:
/// sum_m [ <j1 j1; j2 m-j1 | j m> d^(j2)_{m-j1, j2}(beta) ]^2.
inline double outcome_prob(const ParallelScenario& sc, HalfInt j, Angle beta) {
    if (j < sc.j_min() || j > sc.j_max())
        throw std::domain_error("outcome_prob: j outside |j1-j2| ... j1+j2");
    const HalfInt j2 = sc.j2();
    double p = 0.0;
    for (int tk = -j2.twice(); tk <= j2.twice(); tk += 2) {
        HalfInt k = HalfInt::from_twice(tk);
        double d = wigner_d(j2, k, j2, beta);
        p += eta(sc.j1(), j2, j, k + sc.j1()) * d * d;
    }
    return p;
}

/// Estimator vector for outcome j:
/// V_j = sum_m eta^{j2}_{j m} (c^{j2}_{m-j1}, s^{j2}_{m-j1}) / [(2j2+1)(j2+1)].
inline Vec2 v_vector(const ParallelScenario& sc, HalfInt j) {
    if (j < sc.j_min() || j > sc.j_max())
        throw std::domain_error("v_vector: j outside |j1-j2| ... j1+j2");
    const HalfInt j2 = sc.j2();
    const double norm = (j2.twice() + 1.0) * (0.5 * j2.twice() + 1.0);
    Vec2 v;
    for (int tk = -j2.twice(); tk <= j2.twice(); tk += 2) {
        HalfInt k = HalfInt::from_twice(tk);
        double w = eta(sc.j1(), j2, j, k + sc.j1());
        if (w == 0.0) continue;
        v += w * Vec2{c_coeff(j2, k), s_coeff(j2, k)};
    }
    return (1.0 / norm) * v;
}

/// Full per-outcome estimator table for the parallel-spin measurement.
inline EstimatorTable estimator_table(const ParallelScenario& sc) {
    EstimatorTable table;
    for (int tj = sc.j_min().twice(); tj <= sc.j_max().twice(); tj += 2) {
        HalfInt j = HalfInt::from_twice(tj);
        auto e = detail::make_estimate(j, v_vector(sc, j), &table.has_degenerate);
        table.delta += e.weight;
        table.outcomes.push_back(e);
    }
    return table;
}

/// Optimal average figure of merit for two parallel-spin axes
/// (the closed-form sum over outcomes of |V_j|).
inline double delta_parallel(const ParallelScenario& sc) {
    double sum = 0.0;
    for (int tj = sc.j_min().twice(); tj <= sc.j_max().twice(); tj += 2)
        sum += v_vector(sc, HalfInt::from_twice(tj)).norm();
    return sum;
}

inline double delta_parallel(HalfInt j1, HalfInt j2) {
    return delta_parallel(ParallelScenario(j1, j2));
}

/// Large-N1 limit of delta_parallel at fixed signal spin j2:
/// sum_m sqrt(s_m^2 + c_m^2) / [(2j2+1)(j2+1)].
inline double delta_infinity(HalfInt j2) {
    if (j2.twice() < 1) throw std::domain_error("delta_infinity: j2 must be >= 1/2");
    const double norm = (j2.twice() + 1.0) * (0.5 * j2.twice() + 1.0);
    double sum = 0.0;
    for (int tm = -j2.twice(); tm <= j2.twice(); tm += 2) {
        HalfInt m = HalfInt::from_twice(tm);
        sum += std::hypot(s_coeff(j2, m), c_coeff(j2, m));
    }
    return sum / norm;
}

/// A-coefficient of the 1/N1 correction: A^{j2}_l = j2(j2+1) - l(3l-1).
inline double kappa_a(HalfInt j2, HalfInt l) {
    require_magnetic(j2, l, "kappa_a");
    double lv = l.value();
    return j2.value() * (j2.value() + 1.0) - lv * (3.0 * lv - 1.0);
}

/// B-coefficient: B^{j2}_l = [6 l (j2+l) + l - j2] / (2 j2 + 2 l + 1).
inline double kappa_b(HalfInt j2, HalfInt l) {
    require_magnetic(j2, l, "kappa_b");
    double lv = l.value();
    double jv = j2.value();
    return (6.0 * lv * (jv + lv) + lv - jv) / (2.0 * jv + 2.0 * lv + 1.0);
}

/// Coefficient of the leading 1/N1 deficit:
/// delta_parallel = delta_infinity - kappa/N1 + o(1/N1).
inline double kappa(HalfInt j2) {
    if (j2.twice() < 1) throw std::domain_error("kappa: j2 must be >= 1/2");
    const double norm = (j2.twice() + 1.0) * (0.5 * j2.twice() + 1.0);
    double sum = 0.0;
    for (int tl = -j2.twice(); tl <= j2.twice(); tl += 2) {
        HalfInt l = HalfInt::from_twice(tl);
        double s = s_coeff(j2, l);
        double c = c_coeff(j2, l);
        sum += (kappa_a(j2, l) * c - kappa_b(j2, l) * s * s) / std::hypot(s, c);
    }
    return sum / norm;
}

/// Estimator table for the classical-axis strategy: a Stern-Gerlach
/// measurement of the spin projection m along the reference axis, with
/// V_m = (c_m, s_m) / [(2j2+1)(j2+1)].
inline EstimatorTable classical_estimator_table(HalfInt j2) {
    if (j2.twice() < 1)
        throw std::domain_error("classical_estimator_table: j2 must be >= 1/2");
    const double norm = (j2.twice() + 1.0) * (0.5 * j2.twice() + 1.0);
    EstimatorTable table;
    for (int tm = -j2.twice(); tm <= j2.twice(); tm += 2) {
        HalfInt m = HalfInt::from_twice(tm);
        Vec2 v = (1.0 / norm) * Vec2{c_coeff(j2, m), s_coeff(j2, m)};
        auto e = detail::make_estimate(m, v, &table.has_degenerate);
        table.delta += e.weight;
        table.outcomes.push_back(e);
    }
    return table;
}

/// Figure of merit of the optimal classical-axis strategy; coincides with
/// delta_infinity(j2), the unbounded-reference limit.
inline double delta_classical(HalfInt j2) {
    return classical_estimator_table(j2).delta;
}

}  // namespace quaxis
