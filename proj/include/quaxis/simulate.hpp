// Copyright (c) 2026 quaxis developers.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "quaxis/angular.hpp"
#include "quaxis/errors.hpp"
#include "quaxis/general_axis.hpp"
#include "quaxis/half_int.hpp"
#include "quaxis/parallel.hpp"

namespace quaxis {

/// Counter-based random stream: value k of stream (seed) is
/// mix64(seed + k * golden), so every sample indexes its own disjoint
/// deterministic substream regardless of how work is split across threads.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t counter)
        : state_(seed + counter * kGolden) {}

    std::uint64_t next_u64() {
        state_ += kGolden;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  private:
    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
    std::uint64_t state_;
};

/// Draw the relative polar angle from the rotation-invariant prior:
/// cos(beta) uniform on [-1, 1].
inline Angle sample_relative_angle(CounterRng& rng) {
    double t = 2.0 * rng.next_unit() - 1.0;
    return Angle(std::acos(t));
}

enum class ProtocolMode { parallel, classical, two_spin };

inline const char* to_string(ProtocolMode m) {
    switch (m) {
        case ProtocolMode::parallel: return "parallel";
        case ProtocolMode::classical: return "classical";
        default: return "two_spin";
    }
}

struct SimulationReport {
    std::uint64_t n_samples = 0;
    double empirical_delta = 0.0;
    double std_error = 0.0;
    double theoretical_delta = 0.0;
    double z_score = 0.0;
    std::uint64_t seed = 0;
    ProtocolMode mode = ProtocolMode::parallel;
};

/// A discrete-outcome estimation strategy at fixed relative angle:
/// outcome probabilities as a function of cos(beta), the per-outcome
/// optimal estimates, and the closed-form value the empirical average
/// must reproduce.
class Protocol {
  public:
    std::size_t n_outcomes() const { return estimates_.size(); }
    const std::vector<double>& estimator_angles() const { return estimates_; }
    double theoretical_delta() const { return theory_; }
    bool allows_negative_dust() const { return clamp_dust_; }

    /// Fill p[i] with the outcome probabilities at the given cos(beta).
    void probabilities(double cos_beta, std::span<double> p) const {
        const double u = 0.5 * (1.0 + cos_beta);  // cos^2(beta/2)
        const double v = 1.0 - u;
        if (!monomials_.empty()) {
            for (std::size_t i = 0; i < p.size(); ++i) {
                double acc = 0.0;
                for (const auto& t : monomials_[i])
                    acc += t.weight * ipow(u, t.u_pow) * ipow(v, t.v_pow);
                p[i] = acc;
            }
            return;
        }
        const double ch = std::sqrt(u);
        const double sh = std::sqrt(v);
        double dvals[kMaxSeries];
        for (std::size_t i = 0; i < series_.size(); ++i)
            dvals[i] = series_[i]->eval_half_angle(ch, sh);
        for (std::size_t i = 0; i < p.size(); ++i) {
            double acc = 0.0;
            for (const auto& t : products_[i])
                acc += t.weight * dvals[t.left] * dvals[t.right];
            p[i] = acc;
        }
    }

    /// Optimal-measurement protocol on two parallel-spin axes: outcomes are
    /// the total-spin sectors j.
    static Protocol parallel(const ParallelScenario& sc) {
        Protocol proto;
        const HalfInt j1 = sc.j1(), j2 = sc.j2();
        auto table = estimator_table(sc);
        for (const auto& e : table.outcomes) {
            std::vector<Monomial> terms;
            for (int tk = -j2.twice(); tk <= j2.twice(); tk += 2) {
                HalfInt k = HalfInt::from_twice(tk);
                double w = eta(j1, j2, e.label, k + j1);
                if (w == 0.0) continue;
                // stretched-column Wigner element squared:
                // binom(2j2, j2+k) u^(j2+k) v^(j2-k)
                double lb = log_factorial(j2.twice() / 1 == 0 ? 0 : (2 * j2.twice()) / 2) -
                            log_factorial((j2.twice() + tk) / 2) -
                            log_factorial((j2.twice() - tk) / 2);
                terms.push_back({w * std::exp(lb), (j2.twice() + tk) / 2,
                                 (j2.twice() - tk) / 2});
            }
            proto.monomials_.push_back(std::move(terms));
            proto.estimates_.push_back(e.theta_hat);
        }
        proto.theory_ = table.delta;
        return proto;
    }

    /// Stern-Gerlach along a classical reference axis: outcomes are the
    /// spin projections m with probability [d^(j2)_{m j2}(beta)]^2.
    static Protocol classical(HalfInt j2) {
        Protocol proto;
        auto table = classical_estimator_table(j2);
        for (const auto& e : table.outcomes) {
            int tm = e.label.twice();
            double lb = log_factorial(j2.twice()) -
                        log_factorial((j2.twice() + tm) / 2) -
                        log_factorial((j2.twice() - tm) / 2);
            proto.monomials_.push_back(
                {{std::exp(lb), (j2.twice() + tm) / 2, (j2.twice() - tm) / 2}});
            proto.estimates_.push_back(e.theta_hat);
        }
        proto.theory_ = table.delta;
        return proto;
    }

    /// Rotationally invariant POVM on (parallel reference) x (general axis);
    /// outcome (r, j) probabilities are assembled from the same
    /// eta/xi/Wigner data that define V^M_{rj}.
    static Protocol general(HalfInt j1, const GeneralAxis& axis, const XiFamily& fam,
                            double theory) {
        Protocol proto;
        proto.clamp_dust_ = true;
        const HalfInt M = axis.magnetic_number();
        auto series_index = [&](HalfInt J, HalfInt k) {
            for (std::size_t i = 0; i < proto.series_key_.size(); ++i)
                if (proto.series_key_[i] == std::pair{J.twice(), k.twice()})
                    return static_cast<int>(i);
            proto.series_key_.emplace_back(J.twice(), k.twice());
            proto.series_.push_back(&detail::wigner_series(J, k, M));
            if (proto.series_.size() > kMaxSeries)
                throw std::domain_error("Protocol::general: axis too large to simulate");
            return static_cast<int>(proto.series_.size() - 1);
        };
        for (int b = 0; b < fam.n_blocks(); ++b) {
            HalfInt j = fam.j_at(b);
            for (int r = 0; r < fam.n_outcomes(b); ++r) {
                const auto& xi = fam.matrix(b, r);
                std::vector<Product> terms;
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
                            terms.push_back({w * std::sqrt(e1 * e2),
                                             series_index(Jp, k), series_index(J, k)});
                        }
                    }
                }
                proto.products_.push_back(std::move(terms));
                proto.estimates_.push_back(
                    detail::make_estimate(j, v_vector_general(j1, axis, fam, j, r),
                                          nullptr)
                        .theta_hat);
            }
        }
        proto.theory_ = theory;
        return proto;
    }

  private:
    struct Monomial {
        double weight;
        int u_pow, v_pow;
    };
    struct Product {
        double weight;
        int left, right;
    };
    static constexpr std::size_t kMaxSeries = 64;

    static double ipow(double x, int n) {
        double r = 1.0;
        while (n > 0) {
            if (n & 1) r *= x;
            x *= x;
            n >>= 1;
        }
        return r;
    }

    std::vector<std::vector<Monomial>> monomials_;         // fast path
    std::vector<std::vector<Product>> products_;           // general path
    std::vector<const WignerDSeries*> series_;
    std::vector<std::pair<int, int>> series_key_;
    std::vector<double> estimates_;
    double theory_ = 0.0;
    bool clamp_dust_ = false;
};

namespace detail {

inline int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("QUAXIS_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// In-place pairwise (binary-tree) sum over [first, first+n).
inline double pairwise_sum(double* first, std::size_t n) {
    if (n == 0) return 0.0;
    if (n == 1) return first[0];
    std::size_t half = n / 2;
    return pairwise_sum(first, half) + pairwise_sum(first + half, n - half);
}

constexpr std::size_t kChunkSamples = 8192;
constexpr std::size_t kMaxOutcomes = 512;

struct ChunkSums {
    double score = 0.0;
    double score_sq = 0.0;
};

inline void run_chunk(const Protocol& proto, std::uint64_t seed, std::uint64_t begin,
                      std::uint64_t end, ChunkSums& out) {
    const std::size_t n_out = proto.n_outcomes();
    if (n_out > kMaxOutcomes)
        throw std::domain_error("run_protocol: outcome set too large");
    double probs[kMaxOutcomes];
    double cos_hat[kMaxOutcomes], sin_hat[kMaxOutcomes];
    for (std::size_t i = 0; i < n_out; ++i) {
        cos_hat[i] = std::cos(proto.estimator_angles()[i]);
        sin_hat[i] = std::sin(proto.estimator_angles()[i]);
    }
    double scores[kChunkSamples];
    double scores_sq[kChunkSamples];
    std::size_t count = 0;
    for (std::uint64_t i = begin; i < end; ++i, ++count) {
        CounterRng rng(seed, 2 * i);
        const double t = 2.0 * rng.next_unit() - 1.0;  // cos(beta)
        const double sb = std::sqrt(std::max(0.0, 1.0 - t * t));
        proto.probabilities(t, {probs, n_out});
        double total = 0.0;
        for (std::size_t k = 0; k < n_out; ++k) {
            if (probs[k] < 0.0) {
                if (probs[k] < -1e-10)
                    throw numerical_error(
                        "run_protocol: negative outcome probability " +
                        std::to_string(probs[k]));
                probs[k] = 0.0;
            }
            total += probs[k];
        }
        if (std::fabs(total - 1.0) > 1e-8)
            throw numerical_error("run_protocol: outcome probabilities sum to " +
                                  std::to_string(total));
        const double target = rng.next_unit() * total;
        double cum = 0.0;
        std::size_t pick = n_out - 1;
        for (std::size_t k = 0; k < n_out; ++k) {
            cum += probs[k];
            if (target < cum) {
                pick = k;
                break;
            }
        }
        const double score = t * cos_hat[pick] + sb * sin_hat[pick];
        scores[count] = score;
        scores_sq[count] = score * score;
    }
    out.score = pairwise_sum(scores, count);
    out.score_sq = pairwise_sum(scores_sq, count);
}

}  // namespace detail

/// Simulate a protocol end to end: draw the relative angle from the prior,
/// sample an outcome, apply the optimal estimator, and average the figure
/// of merit.  The per-sample random streams and the fixed pairwise
/// reduction make the report bit-identical for any worker count.
inline SimulationReport run_protocol(const Protocol& proto, ProtocolMode mode,
                                     std::uint64_t n, std::uint64_t seed,
                                     int threads = 0) {
    if (n < 1000)
        throw std::domain_error("run_protocol: need at least 1000 samples");
    const std::uint64_t n_chunks =
        (n + detail::kChunkSamples - 1) / detail::kChunkSamples;
    std::vector<detail::ChunkSums> chunks(n_chunks);

    const int n_threads =
        static_cast<int>(std::min<std::uint64_t>(
            static_cast<std::uint64_t>(detail::resolve_thread_count(threads)),
            n_chunks));
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        try {
            while (true) {
                std::uint64_t c = next.fetch_add(1);
                if (c >= n_chunks) return;
                std::uint64_t begin = c * detail::kChunkSamples;
                std::uint64_t end = std::min<std::uint64_t>(n, begin + detail::kChunkSamples);
                detail::run_chunk(proto, seed, begin, end, chunks[c]);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<double> sums(n_chunks), sums_sq(n_chunks);
    for (std::uint64_t c = 0; c < n_chunks; ++c) {
        sums[c] = chunks[c].score;
        sums_sq[c] = chunks[c].score_sq;
    }
    const double total = detail::pairwise_sum(sums.data(), n_chunks);
    const double total_sq = detail::pairwise_sum(sums_sq.data(), n_chunks);

    SimulationReport rep;
    rep.mode = mode;
    rep.n_samples = n;
    rep.seed = seed;
    rep.theoretical_delta = proto.theoretical_delta();
    const double nn = static_cast<double>(n);
    rep.empirical_delta = total / nn;
    double var = (total_sq - nn * rep.empirical_delta * rep.empirical_delta) / (nn - 1.0);
    rep.std_error = std::sqrt(std::max(0.0, var) / nn);
    rep.z_score = (rep.empirical_delta - rep.theoretical_delta) / rep.std_error;
    return rep;
}

/// Parallel-spin protocol, compared against the closed-form delta_parallel.
inline SimulationReport run_protocol_parallel(const ParallelScenario& sc,
                                              std::uint64_t n, std::uint64_t seed,
                                              int threads = 0) {
    return run_protocol(Protocol::parallel(sc), ProtocolMode::parallel, n, seed,
                        threads);
}

/// Classical-axis Stern-Gerlach protocol, compared against delta_infinity.
inline SimulationReport run_protocol_classical(HalfInt j2, std::uint64_t n,
                                               std::uint64_t seed, int threads = 0) {
    return run_protocol(Protocol::classical(j2), ProtocolMode::classical, n, seed,
                        threads);
}

/// Two-spin M = 0 protocol with the bound-attaining measurement, compared
/// against the closed-form delta_two_spin.
inline SimulationReport run_protocol_two_spin(HalfInt j1, double x, std::uint64_t n,
                                              std::uint64_t seed, int threads = 0) {
    GeneralAxis axis = GeneralAxis::two_spin(x);
    XiFamily fam = XiFamily::two_spin_attaining(j1);
    double theory = delta_two_spin(j1, x).delta;
    return run_protocol(Protocol::general(j1, axis, fam, theory),
                        ProtocolMode::two_spin, n, seed, threads);
}

}  // namespace quaxis
