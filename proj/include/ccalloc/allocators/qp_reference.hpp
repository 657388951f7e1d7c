#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "ccalloc/allocators/qpca.hpp"

namespace ccalloc {

/// General-purpose box QP on the normal equations, for comparison with the
/// structured allocators. Forms P = B^T W B + 2 lambda I and
/// q = -B^T W nu - 2 lambda u_ref on the heap and runs a projected Newton
/// active-set iteration with Armijo backtracking, cold-started at clamp(0).
inline AllocationResult qp_reference(const EffectivenessMatrix& bm, const Vec& nu,
                                     const ActuatorLimits& limits, const ActuatorState& state,
                                     const QpcaOptions& opt = {}, int max_iterations = 200) {
    detail::Stopwatch clock;
    const Mat& bfix = bm.matrix();
    detail::check_problem(bfix, nu);
    detail::check_limits(bfix, limits, state);
    const Eigen::Index o = bfix.rows();
    const Eigen::Index m = bfix.cols();
    const EffectiveBounds bounds = effective_bounds(limits, state);

    const Eigen::MatrixXd b = bfix;
    const Eigen::MatrixXd w = opt.weight.size() == 0 ? Eigen::MatrixXd::Identity(o, o)
                                                     : Eigen::MatrixXd(opt.weight);
    const Eigen::VectorXd u_ref = opt.u_ref.size() == 0 ? Eigen::VectorXd::Zero(m)
                                                        : Eigen::VectorXd(opt.u_ref);
    const Eigen::VectorXd lo = bounds.lo;
    const Eigen::VectorXd hi = bounds.hi;
    Eigen::MatrixXd p = b.transpose() * w * b;
    p.diagonal().array() += 2.0 * opt.reg_lambda;
    const Eigen::VectorXd q = -b.transpose() * w * Eigen::VectorXd(nu) - 2.0 * opt.reg_lambda * u_ref;

    auto objective = [&](const Eigen::VectorXd& x) { return 0.5 * x.dot(p * x) + q.dot(x); };
    auto project = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return x.cwiseMax(lo).cwiseMin(hi); };

    Eigen::VectorXd x = project(Eigen::VectorXd::Zero(m));
    const double gtol = 1e-12 * (q.norm() + p.norm() * (lo.cwiseAbs().cwiseMax(hi.cwiseAbs()).norm()) + 1.0);
    int it = 0;
    for (; it < max_iterations; ++it) {
        const Eigen::VectorXd g = p * x + q;
        // Binding set: on a bound with the gradient pushing outward.
        std::vector<Eigen::Index> free;
        double pg = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            const bool bind_lo = x(i) <= lo(i) && g(i) > 0.0;
            const bool bind_hi = x(i) >= hi(i) && g(i) < 0.0;
            if (!bind_lo && !bind_hi) {
                free.push_back(i);
                pg = std::max(pg, std::abs(g(i)));
            }
        }
        if (pg <= gtol) break;

        Eigen::VectorXd d = Eigen::VectorXd::Zero(m);
        const auto nf = static_cast<Eigen::Index>(free.size());
        Eigen::MatrixXd pff(nf, nf);
        Eigen::VectorXd gf(nf);
        for (Eigen::Index r = 0; r < nf; ++r) {
            gf(r) = g(free[r]);
            for (Eigen::Index c = 0; c < nf; ++c) pff(r, c) = p(free[r], free[c]);
        }
        const Eigen::VectorXd df = pff.ldlt().solve(-gf);
        for (Eigen::Index r = 0; r < nf; ++r) d(free[r]) = df(r);
        if (!d.allFinite() || g.dot(d) >= 0.0) d = -g;  // fall back to steepest descent

        const double f0 = objective(x);
        double alpha = 1.0;
        Eigen::VectorXd next = project(x + d);
        for (int k = 0; k < 60 && objective(next) > f0 + 1e-4 * g.dot(next - x); ++k) {
            alpha *= 0.5;
            next = project(x + alpha * d);
        }
        if ((next - x).lpNorm<Eigen::Infinity>() == 0.0) break;
        x = next;
    }
    auto res = detail::finish(bfix, nu, clamp(Vec(x), bounds), it + 1);
    res.elapsed = clock.seconds();
    return res;
}

}  // namespace ccalloc
