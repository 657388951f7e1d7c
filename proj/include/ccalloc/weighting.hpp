#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "ccalloc/core.hpp"

namespace ccalloc {

/// Affine drag-coefficient proxy C_D,i(u_i) = max(floor, c0_i + c1_i u_i).
struct DragModel {
    Vec c0;
    Vec c1;
    double floor = 1e-6;

    /// Upper flaps (u1, u2) and lower flaps (u3, u4), lower ones with twice the slope.
    static DragModel hypersonic_flaps() {
        Vec c0 = Vec::Constant(4, 0.001);
        Vec c1(4);
        c1 << 0.004, 0.004, 0.008, 0.008;
        return {c0, c1, 1e-6};
    }

    static DragModel uniform(int m, double c0 = 0.001, double c1 = 0.004) {
        return {Vec::Constant(m, c0), Vec::Constant(m, c1), 1e-6};
    }

    /// Four-effector vehicles get the flap model, anything else a uniform one.
    static DragModel default_for(int m) { return m == 4 ? hypersonic_flaps() : uniform(m); }

    Vec evaluate(const Vec& u) const {
        if (u.size() != c0.size() || c1.size() != c0.size())
            throw DimensionError("drag model length does not match effector count");
        return (c0 + c1.cwiseProduct(u)).cwiseMax(floor);
    }
};

struct WeightingConfig {
    double epsilon = 1e-3;
    DragModel drag;
};

/// Diagonals of W_m and W_r.
struct WeightingMatrices {
    Vec w_m;
    Vec w_r;
};

inline Vec magnitude_weights(const Vec& u, const Vec& u_min, const Vec& u_max, const DragModel& drag,
                             double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgumentError("epsilon must be positive");
    const auto m = u.size();
    if (u_min.size() != m || u_max.size() != m)
        throw DimensionError("magnitude weights: limit length does not match u");
    const Vec cd = drag.evaluate(u);
    const double cd_max = cd.maxCoeff();
    Vec w(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        if (u_max(i) < 0.0)
            throw DegenerateLimitsError("u_max is negative for effector " + std::to_string(i + 1));
        if (u_max(i) == 0.0) {
            w(i) = 1.0 + epsilon;  // limit scheduled shut: maximal penalty, drag ignored
            continue;
        }
        double w_d;
        if (u(i) >= 0.0) {
            w_d = u(i) / u_max(i);
        } else {
            w_d = std::abs(u(i)) / std::max(std::abs(u_min(i)), std::abs(u_max(i)));
        }
        w(i) = std::max(w_d * (cd(i) / cd_max), 0.0) + epsilon;
    }
    return w;
}

inline Vec rate_weights(const ActuatorState& state, const ActuatorLimits& limits, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgumentError("epsilon must be positive");
    const auto m = limits.size();
    const Vec rate = state.rate();
    Vec w(m);
    for (int i = 0; i < m; ++i) {
        if (limits.rate_max(i) == 0.0 || limits.rate_min(i) == 0.0)
            throw DegenerateLimitsError("zero rate bound for effector " + std::to_string(i + 1));
        const double crit = rate(i) >= 0.0 ? std::abs(limits.rate_max(i)) : std::abs(limits.rate_min(i));
        w(i) = std::abs(rate(i)) / crit + epsilon;  // infinite bound gives epsilon
    }
    return w;
}

inline WeightingMatrices compute_weights(const ActuatorLimits& limits, const ActuatorState& state,
                                         const WeightingConfig& cfg) {
    return {magnitude_weights(state.u_prev, limits.u_min, limits.u_max, cfg.drag, cfg.epsilon),
            rate_weights(state, limits, cfg.epsilon)};
}

/// Uniform weights: W_m = (1 + eps) I, W_r = eps I.
inline WeightingMatrices identity_weights(int m, double epsilon = 1e-3) {
    return {Vec::Constant(m, 1.0 + epsilon), Vec::Constant(m, epsilon)};
}

}  // namespace ccalloc
