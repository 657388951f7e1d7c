#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "ccalloc/allocators/idca.hpp"
#include "ccalloc/allocators/pseudoinverse.hpp"
#include "ccalloc/allocators/qp_reference.hpp"
#include "ccalloc/allocators/qpca.hpp"

namespace ccalloc {

enum class Algorithm { pica, saturated_pica, rpica, rspica, qpca, idca, qp_reference };

inline constexpr std::array<Algorithm, 7> kAllAlgorithms = {
    Algorithm::pica, Algorithm::saturated_pica, Algorithm::rpica, Algorithm::rspica,
    Algorithm::qpca, Algorithm::idca,           Algorithm::qp_reference};

inline std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::pica: return "pica";
        case Algorithm::saturated_pica: return "sat_pica";
        case Algorithm::rpica: return "rpica";
        case Algorithm::rspica: return "rspica";
        case Algorithm::qpca: return "qpca";
        case Algorithm::idca: return "idca";
        case Algorithm::qp_reference: return "qp_reference";
    }
    return "?";
}

inline std::optional<Algorithm> parse_algorithm(std::string_view name) {
    for (auto a : kAllAlgorithms)
        if (to_string(a) == name) return a;
    return std::nullopt;
}

/// Everything an allocator may need for one call.
struct AllocationProblem {
    EffectivenessMatrix b;
    Vec nu;
    ActuatorLimits limits;
    ActuatorState state;
    WeightingMatrices weights;
    Vec u_s;
};

struct AllocatorOptions {
    RedistributionOptions redistribution;
    QpcaOptions qpca;
    IdcaConfig idca;
};

inline AllocationResult allocate(Algorithm a, const AllocationProblem& p, const AllocatorOptions& opt = {}) {
    switch (a) {
        case Algorithm::pica: return pica(p.b, p.nu, opt.redistribution.rank_tol);
        case Algorithm::saturated_pica:
            return saturated_pica(p.b, p.nu, p.limits, p.state, opt.redistribution.rank_tol);
        case Algorithm::rpica: return rpica(p.b, p.nu, p.limits, p.state, opt.redistribution);
        case Algorithm::rspica: return rspica(p.b, p.nu, p.limits, p.state, opt.redistribution);
        case Algorithm::qpca: return qpca(p.b, p.nu, p.limits, p.state, opt.qpca);
        case Algorithm::idca: return idca(p.b, p.nu, p.limits, p.state, p.u_s, p.weights, opt.idca);
        case Algorithm::qp_reference: return qp_reference(p.b, p.nu, p.limits, p.state, opt.qpca);
    }
    throw InvalidArgumentError("unknown algorithm");
}

}  // namespace ccalloc
