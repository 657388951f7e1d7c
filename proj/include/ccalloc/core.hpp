#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ccalloc/types.hpp"

namespace ccalloc {

/// Per-effector magnitude bounds (deg) and rate bounds (deg/s).
struct ActuatorLimits {
    Vec u_min;
    Vec u_max;
    Vec rate_min;
    Vec rate_max;

    int size() const { return static_cast<int>(u_min.size()); }

    /// Magnitude box only, rates unbounded.
    static ActuatorLimits box(const Vec& lo, const Vec& hi) {
        const double inf = std::numeric_limits<double>::infinity();
        return {lo, hi, Vec::Constant(lo.size(), -inf), Vec::Constant(lo.size(), inf)};
    }

    static ActuatorLimits uniform(int m, double lo, double hi, double rate_lo, double rate_hi) {
        return {Vec::Constant(m, lo), Vec::Constant(m, hi), Vec::Constant(m, rate_lo),
                Vec::Constant(m, rate_hi)};
    }

    void validate() const {
        const auto m = u_min.size();
        if (u_max.size() != m || rate_min.size() != m || rate_max.size() != m)
            throw DimensionError("actuator limit vectors differ in length");
        for (Eigen::Index i = 0; i < m; ++i) {
            if (std::isnan(u_min(i)) || std::isnan(u_max(i)) || !(u_min(i) <= u_max(i)))
                throw DegenerateLimitsError("u_min > u_max for effector " + std::to_string(i + 1));
            if (!(rate_min(i) <= 0.0) || !(rate_max(i) >= 0.0))
                throw DegenerateLimitsError("rate limits must bracket zero for effector " +
                                            std::to_string(i + 1));
        }
    }
};

/// u(t-T), u(t-2T) and the step T.
struct ActuatorState {
    Vec u_prev;
    Vec u_prev2;
    double dt = kDefaultDt;

    static ActuatorState at_rest(const Vec& u, double dt = kDefaultDt) { return {u, u, dt}; }

    Vec rate() const { return (u_prev - u_prev2) / dt; }

    void validate(int m) const {
        if (u_prev.size() != m || u_prev2.size() != m)
            throw DimensionError("actuator state length does not match effector count");
        if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgumentError("dt must be positive");
        if (!all_finite(u_prev) || !all_finite(u_prev2))
            throw InvalidArgumentError("actuator state has non-finite entries");
    }
};

struct EffectiveBounds {
    Vec lo;
    Vec hi;

    int size() const { return static_cast<int>(lo.size()); }
};

inline Vec saturate_rate(const Vec& rate, const ActuatorLimits& limits) {
    return rate.cwiseMax(limits.rate_min).cwiseMin(limits.rate_max);
}

/// Magnitude box intersected with the one-step rate-reachable interval.
inline EffectiveBounds effective_bounds(const ActuatorLimits& limits, const ActuatorState& state) {
    const auto m = limits.size();
    EffectiveBounds b{Vec(m), Vec(m)};
    for (int i = 0; i < m; ++i) {
        const double reach_lo = state.u_prev(i) + limits.rate_min(i) * state.dt;
        const double reach_hi = state.u_prev(i) + limits.rate_max(i) * state.dt;
        double lo = std::max(limits.u_min(i), reach_lo);
        double hi = std::min(limits.u_max(i), reach_hi);
        if (lo > hi) {
            // The magnitude box moved past u_prev: retract toward it as far as the rate allows.
            const double target = std::clamp(state.u_prev(i), limits.u_min(i), limits.u_max(i));
            lo = hi = std::clamp(target, reach_lo, reach_hi);
        }
        b.lo(i) = lo;
        b.hi(i) = hi;
    }
    return b;
}

inline Vec clamp(const Vec& u, const EffectiveBounds& b) { return u.cwiseMax(b.lo).cwiseMin(b.hi); }

inline Vec saturate(const Vec& u, const ActuatorLimits& limits, const ActuatorState& state) {
    return clamp(u, effective_bounds(limits, state));
}

inline bool is_feasible(const Vec& u, const EffectiveBounds& b, double tol = kDefaultFeasibilityTol) {
    return ((u.array() >= b.lo.array() - tol) && (u.array() <= b.hi.array() + tol)).all();
}

inline bool is_feasible(const Vec& u, const ActuatorLimits& limits, const ActuatorState& state,
                        double tol = kDefaultFeasibilityTol) {
    return is_feasible(u, effective_bounds(limits, state), tol);
}

}  // namespace ccalloc
