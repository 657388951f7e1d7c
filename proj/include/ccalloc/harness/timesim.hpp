#pragma once

#include <cmath>
#include <vector>

#include "ccalloc/ams.hpp"
#include "ccalloc/harness/problem.hpp"

namespace ccalloc {

struct TimesimStep {
    double t = 0.0;
    Vec nu_cmd;
    Vec nu_ach;
    Vec err;
    Vec u;
    Vec udot;
    ActuatorLimits limits;  // scheduled limits at t
    EffectiveBounds bounds; // rate-intersected box actually used
    int iterations = 0;
    double elapsed = 0.0;
};

struct TimesimLog {
    Algorithm algorithm = Algorithm::idca;
    Vec amplitude;  // resolved command amplitude
    std::vector<TimesimStep> steps;
};

inline int timesim_steps(const ScenarioConfig& cfg) {
    return static_cast<int>(std::llround(cfg.duration / cfg.dt));
}

/// Command amplitude: explicit, or scale times the AMS half-extent of the t = 0 magnitude box.
inline Vec resolve_amplitude(const ScenarioConfig& cfg) {
    const auto& c = cfg.command;
    if (c.kind != CommandSource::Kind::sinusoid) return Vec::Zero(cfg.axes());
    if (!c.auto_amplitude) return c.amplitude;
    const ActuatorLimits l0 = cfg.limits_at(0.0);
    return c.amplitude_scale * moment_set(cfg.b.matrix(), {l0.u_min, l0.u_max}).half_extent();
}

inline Vec command_at(const ScenarioConfig& cfg, const Vec& amplitude, double t) {
    if (cfg.command.kind == CommandSource::Kind::sinusoid) return cfg.command.sinusoid_at(t, amplitude);
    return cfg.command.value;
}

/// Sequential closed iteration: each step's state is built from the two previous commands.
inline TimesimLog run_timesim(const ScenarioConfig& cfg, Algorithm algorithm = Algorithm::idca) {
    TimesimLog log;
    log.algorithm = algorithm;
    log.amplitude = resolve_amplitude(cfg);
    const int n = timesim_steps(cfg);
    log.steps.reserve(static_cast<std::size_t>(n));
    Vec u_prev = cfg.initial.u_prev;
    Vec u_prev2 = cfg.initial.u_prev2;
    for (int k = 0; k < n; ++k) {
        TimesimStep s;
        s.t = k * cfg.dt;
        s.limits = cfg.limits_at(s.t);
        const ActuatorState state{u_prev, u_prev2, cfg.dt};
        s.bounds = effective_bounds(s.limits, state);
        s.nu_cmd = command_at(cfg, log.amplitude, s.t);
        const auto problem = make_problem(cfg, s.nu_cmd, s.limits, state, cfg.baseline.at(s.t));
        const auto r = allocate(algorithm, problem, cfg.allocator);
        s.u = r.u;
        s.nu_ach = r.achieved;
        s.err = r.residual;
        s.udot = (r.u - u_prev) / cfg.dt;
        s.iterations = r.iterations;
        s.elapsed = r.elapsed;
        u_prev2 = u_prev;
        u_prev = r.u;
        log.steps.push_back(std::move(s));
    }
    return log;
}

struct TimesimAudit {
    int steps = 0;
    int magnitude_violations = 0;
    int rate_violations = 0;
    int feasible_steps = 0;        // nu inside the AMS of the rate-intersected box
    int feasible_misses = 0;       // of those, steps with ||err|| > residual_tol
    int bound_rate_violations = 0; // pushed further into a bound it was already resting on
    double max_feasible_error = 0.0;
};

/// Post-hoc log checks. An effector "rests on" a bound at step k-1 when it is
/// within kSaturationTol of it; at step k its rate toward that bound, measured
/// relative to the bound's own motion, must not exceed rate_tol.
inline TimesimAudit audit_timesim(const ScenarioConfig& cfg, const TimesimLog& log, double tol = 1e-9,
                                  double rate_tol = 1e-9) {
    TimesimAudit a;
    a.steps = static_cast<int>(log.steps.size());
    const double residual_tol = cfg.allocator.idca.residual_tol;
    for (std::size_t k = 0; k < log.steps.size(); ++k) {
        const auto& s = log.steps[k];
        const auto& l = s.limits;
        for (Eigen::Index i = 0; i < s.u.size(); ++i) {
            if (s.u(i) < l.u_min(i) - tol || s.u(i) > l.u_max(i) + tol) ++a.magnitude_violations;
            if (s.udot(i) < l.rate_min(i) - tol || s.udot(i) > l.rate_max(i) + tol) ++a.rate_violations;
            if (k == 0) continue;
            const auto& p = log.steps[k - 1];
            if (std::abs(p.u(i) - p.limits.u_max(i)) <= kSaturationTol) {
                const double toward = ((s.u(i) - l.u_max(i)) - (p.u(i) - p.limits.u_max(i))) / cfg.dt;
                if (toward > rate_tol) ++a.bound_rate_violations;
            }
            if (std::abs(p.u(i) - p.limits.u_min(i)) <= kSaturationTol) {
                const double toward = ((l.u_min(i) - s.u(i)) - (p.limits.u_min(i) - p.u(i))) / cfg.dt;
                if (toward > rate_tol) ++a.bound_rate_violations;
            }
        }
        if (contains(cfg.b.matrix(), s.bounds, s.nu_cmd, cfg.membership_tol)) {
            ++a.feasible_steps;
            const double e = s.err.norm();
            a.max_feasible_error = std::max(a.max_feasible_error, e);
            if (e > residual_tol) ++a.feasible_misses;
        }
    }
    return a;
}

}  // namespace ccalloc
