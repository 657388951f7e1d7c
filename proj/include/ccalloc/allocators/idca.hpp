#pragma once

#include <cmath>
#include <vector>

#include "ccalloc/allocators/result.hpp"
#include "ccalloc/linalg.hpp"
#include "ccalloc/weighting.hpp"

namespace ccalloc {

struct IdcaConfig {
    int max_iterations = 8;
    double residual_tol = 1e-6;
    double rank_tol = kDefaultRankTol;
    bool shift_steady_state = true;  // u_s^(j) = u_s^(j-1) - u^(j)
    bool release_saturated = true;   // let a stuck column back off its bound

    void validate() const {
        if (max_iterations < 1) throw InvalidArgumentError("idca max_iterations must be >= 1");
        if (!(residual_tol > 0.0)) throw InvalidArgumentError("idca residual_tol must be > 0");
        if (!(rank_tol >= 0.0)) throw InvalidArgumentError("idca rank_tol must be >= 0");
    }
};

/// Snapshot of one IDCA iteration, for diagnostics and tests.
struct IdcaIteration {
    Vec candidate;    // unsaturated filter output
    Vec increment;    // saturated increment
    Vec accumulated;  // sum of increments so far
    EffectiveBounds room;
    Mask free;
    double residual_norm = 0.0;
};

/// Iterative dynamic control allocation.
///
/// Each pass solves the weighted linear-filter problem
///   u = E u_s + F u_tau + G nu
/// for the residual with the current column set, clamps the result to the room
/// left inside the magnitude and rate bounds, and re-centres limits, u_s and
/// u_tau on the accumulated command. Saturated columns are dropped from B_s;
/// when nothing new saturates, one dropped column whose residual gradient
/// points back into its box is reinstated. Returns the lowest-residual
/// accumulation seen, which is feasible by construction.
inline AllocationResult idca(const EffectivenessMatrix& bm, const Vec& nu, const ActuatorLimits& limits,
                             const ActuatorState& state, const Vec& u_s, const WeightingMatrices& weights,
                             const IdcaConfig& cfg = {}, std::vector<IdcaIteration>* trace = nullptr) {
    detail::Stopwatch clock;
    const Mat& b = bm.matrix();
    detail::check_problem(b, nu);
    detail::check_limits(b, limits, state);
    cfg.validate();
    const int m = static_cast<int>(b.cols());
    if (u_s.size() != m) throw DimensionError("u_s length does not match effector count");

    const EffectiveBounds bounds = effective_bounds(limits, state);
    // Shifted problem: everything below is relative to the accumulated command.
    ActuatorLimits shifted = limits;
    ActuatorState tau{state.u_prev, state.u_prev, state.dt};
    Vec target = u_s;
    Vec acc = Vec::Zero(m);
    Vec res = nu;
    Mask free = Mask::Constant(m, true);
    Vec col_norm(m);
    for (int i = 0; i < m; ++i) col_norm(i) = b.col(i).norm();

    Vec best;
    double best_err = 0.0;
    int iterations = 0;

    for (int j = 1; j <= cfg.max_iterations; ++j) {
        Mat bs = b;
        for (int i = 0; i < m; ++i)
            if (!free(i)) bs.col(i).setZero();
        const auto gains = filter_gains(bs, weights.w_m, weights.w_r, cfg.rank_tol);
        Vec c = gains.E * target + gains.F * tau.u_prev + gains.G * res;
        for (int i = 0; i < m; ++i)
            if (!free(i)) c(i) = 0.0;

        const EffectiveBounds room = effective_bounds(shifted, tau);
        const Vec step = clamp(c, room);

        acc += step;
        shifted.u_min -= step;
        shifted.u_max -= step;
        tau.u_prev -= step;
        if (cfg.shift_steady_state) target -= step;
        res -= bs * step;
        iterations = j;

        const Vec true_res = nu - b * acc;
        const double err = true_res.norm();
        if (j == 1 || err < best_err) {
            best = acc;
            best_err = err;
        }
        const EffectiveBounds left = effective_bounds(shifted, tau);
        if (trace) trace->push_back({c, step, acc, room, free, err});
        if (err <= cfg.residual_tol) break;

        bool newly = false;
        for (int i = 0; i < m; ++i) {
            if (free(i) && (left.hi(i) <= kSaturationTol || left.lo(i) >= -kSaturationTol)) {
                free(i) = false;
                newly = true;
            }
        }
        if (cfg.release_saturated && (!newly || !free.any())) {
            // Reinstate the frozen column whose gradient most strongly points into its box.
            const Vec g = b.transpose() * true_res;
            int pick = -1;
            double pick_score = 0.0;
            for (int i = 0; i < m; ++i) {
                if (free(i) || col_norm(i) == 0.0) continue;
                const bool at_lo = left.lo(i) >= -kSaturationTol;
                const bool at_hi = left.hi(i) <= kSaturationTol;
                const double tol = 1e-12 * col_norm(i) * err;
                const bool inward = (at_lo && !at_hi && g(i) > tol) || (at_hi && !at_lo && g(i) < -tol);
                const double score = std::abs(g(i)) / col_norm(i);
                if (inward && score > pick_score) {
                    pick = i;
                    pick_score = score;
                }
            }
            if (pick >= 0) {
                free(pick) = true;
                res = true_res;
                continue;
            }
        }
        if (!newly || !free.any()) break;
    }
    auto out = detail::finish(b, nu, clamp(best, bounds), iterations);
    out.elapsed = clock.seconds();
    return out;
}

}  // namespace ccalloc
