#pragma once

#include <vector>

#include "ccalloc/harness/problem.hpp"

namespace ccalloc {

struct TrialRecord {
    Algorithm algorithm;
    AllocationResult result;
    bool feasible = true;  // against the effective bounds at feasibility_tol
};

struct StationaryReport {
    Vec nu;
    EffectiveBounds bounds;
    std::vector<TrialRecord> rows;
};

inline StationaryReport run_stationary(const ScenarioConfig& cfg) {
    StationaryReport rep;
    rep.nu = cfg.command.value;
    const ActuatorLimits limits = cfg.limits_at(0.0);
    rep.bounds = effective_bounds(limits, cfg.initial);
    const auto problem = make_problem(cfg, rep.nu, limits, cfg.initial, cfg.baseline.at(0.0));
    for (auto a : cfg.algorithms) {
        auto r = allocate(a, problem, cfg.allocator);
        const bool ok = is_feasible(r.u, rep.bounds, cfg.feasibility_tol);
        rep.rows.push_back({a, std::move(r), ok});
    }
    return rep;
}

}  // namespace ccalloc
