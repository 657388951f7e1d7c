#pragma once

#include "ccalloc/harness/config.hpp"
#include "ccalloc/steady_state.hpp"

namespace ccalloc {

/// Weights and steady-state target for one allocation call of a scenario.
inline AllocationProblem make_problem(const ScenarioConfig& cfg, const Vec& nu, const ActuatorLimits& limits,
                                      const ActuatorState& state, const Vec& u_r) {
    AllocationProblem p{cfg.b, nu, limits, state, compute_weights(limits, state, cfg.weighting), u_r};
    if (cfg.steady_state == SteadyStatePolicy::conditionalized) {
        const Vec delta_nu = nu - cfg.b.matrix() * u_r;
        p.u_s = steady_state_target(cfg.b.matrix(), u_r, delta_nu, cfg.allocator.idca.rank_tol);
    }
    return p;
}

}  // namespace ccalloc
