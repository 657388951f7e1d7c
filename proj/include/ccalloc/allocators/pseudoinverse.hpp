#pragma once

#include <algorithm>

#include "ccalloc/allocators/result.hpp"
#include "ccalloc/linalg.hpp"

namespace ccalloc {

/// Min-norm unconstrained allocation u = B^+ nu. Limits are ignored.
inline AllocationResult pica(const EffectivenessMatrix& bm, const Vec& nu,
                             double rank_tol = kDefaultRankTol) {
    detail::Stopwatch clock;
    const Mat& b = bm.matrix();
    detail::check_problem(b, nu);
    auto r = detail::finish(b, nu, pinv(b, rank_tol) * nu, 1);
    r.elapsed = clock.seconds();
    return r;
}

/// PICA followed by a clamp into the effective bounds.
inline AllocationResult saturated_pica(const EffectivenessMatrix& bm, const Vec& nu,
                                       const ActuatorLimits& limits, const ActuatorState& state,
                                       double rank_tol = kDefaultRankTol) {
    detail::Stopwatch clock;
    const Mat& b = bm.matrix();
    detail::check_problem(b, nu);
    detail::check_limits(b, limits, state);
    auto r = detail::finish(b, nu, saturate(pinv(b, rank_tol) * nu, limits, state), 1);
    r.elapsed = clock.seconds();
    return r;
}

struct RedistributionOptions {
    int max_iterations = 8;
    double residual_tol = 1e-6;
    double rank_tol = kDefaultRankTol;
    bool scaled = false;  // RSPICA: shrink each increment along its direction
};

namespace detail {

// Shared RPICA / RSPICA loop. Room is tracked as bounds shifted by the
// accumulated command so every increment is clamped against what is left.
inline AllocationResult redistribute(const Mat& b, const Vec& nu, const ActuatorLimits& limits,
                                     const ActuatorState& state, const RedistributionOptions& opt) {
    if (opt.max_iterations < 1) throw InvalidArgumentError("max_iterations must be >= 1");
    check_problem(b, nu);
    check_limits(b, limits, state);
    const int m = static_cast<int>(b.cols());
    const EffectiveBounds bounds = effective_bounds(limits, state);
    Vec lo_room = bounds.lo;
    Vec hi_room = bounds.hi;
    Vec acc = Vec::Zero(m);
    Vec res = nu;
    Mask free = Mask::Constant(m, true);
    Vec best;
    double best_err = 0.0;
    int iterations = 0;

    for (int j = 1; j <= opt.max_iterations; ++j) {
        Mat bs = b;
        for (int i = 0; i < m; ++i)
            if (!free(i)) bs.col(i).setZero();
        Vec c = pinv(bs, opt.rank_tol) * res;
        for (int i = 0; i < m; ++i)
            if (!free(i)) c(i) = 0.0;

        Vec step;
        bool trivial = false;
        if (opt.scaled) {
            // a = min(1, l_i / c_i) over components with c_i != 0
            double a = 1.0;
            int limiting = -1;
            for (int i = 0; i < m; ++i) {
                if (!free(i) || c(i) == 0.0) continue;
                const double ratio = std::max(0.0, (c(i) > 0.0 ? hi_room(i) : lo_room(i)) / c(i));
                if (ratio < a) {
                    a = ratio;
                    limiting = i;
                }
            }
            step = a * c;
            if (limiting >= 0) step(limiting) = c(limiting) > 0.0 ? hi_room(limiting) : lo_room(limiting);
            trivial = a == 0.0;
        } else {
            step = c;
        }
        step = step.cwiseMax(lo_room).cwiseMin(hi_room);

        acc += step;
        lo_room -= step;
        hi_room -= step;
        res -= bs * step;
        iterations = j;

        const double err = (nu - b * acc).norm();
        if (j == 1 || err < best_err) {
            best = acc;
            best_err = err;
        }
        if (err <= opt.residual_tol || trivial) break;

        bool newly = false;
        for (int i = 0; i < m; ++i) {
            if (free(i) && (hi_room(i) <= kSaturationTol || lo_room(i) >= -kSaturationTol)) {
                free(i) = false;
                newly = true;
            }
        }
        if (!newly) break;  // fixed point: the next increment would be zero
        if (!free.any()) break;
        Mat next = b;
        for (int i = 0; i < m; ++i)
            if (!free(i)) next.col(i).setZero();
        if (numerical_rank(next, opt.rank_tol) == 0) break;
    }
    return finish(b, nu, clamp(best, bounds), iterations);
}

}  // namespace detail

/// Redistributed pseudoinverse: saturate, drop saturated columns, reallocate the residual.
inline AllocationResult rpica(const EffectivenessMatrix& bm, const Vec& nu, const ActuatorLimits& limits,
                              const ActuatorState& state, RedistributionOptions opt = {}) {
    detail::Stopwatch clock;
    opt.scaled = false;
    auto r = detail::redistribute(bm.matrix(), nu, limits, state, opt);
    r.elapsed = clock.seconds();
    return r;
}

/// Scaled variant: each increment is shrunk by a = min(1, l_i / u_i) before saturation.
inline AllocationResult rspica(const EffectivenessMatrix& bm, const Vec& nu, const ActuatorLimits& limits,
                               const ActuatorState& state, RedistributionOptions opt = {}) {
    detail::Stopwatch clock;
    opt.scaled = true;
    auto r = detail::redistribute(bm.matrix(), nu, limits, state, opt);
    r.elapsed = clock.seconds();
    return r;
}

}  // namespace ccalloc
