#pragma once

#include <cmath>

#include <Eigen/Cholesky>

#include "ccalloc/allocators/result.hpp"
#include "ccalloc/bvls.hpp"

namespace ccalloc {

struct QpcaOptions {
    Mat weight;               // o x o SPD; empty means identity
    double reg_lambda = 1e-6;
    Vec u_ref;                // empty means zero
    bool polish = true;       // re-solve the final face for an exact fit
    double rank_tol = kDefaultRankTol;
};

namespace detail {

// Upper-triangular factor R with W = R^T R, so ||B u - nu||_W = ||R (B u - nu)||.
inline Mat weight_factor(const QpcaOptions& opt, int o) {
    if (opt.weight.size() == 0) return Mat::Identity(o, o);
    if (opt.weight.rows() != o || opt.weight.cols() != o)
        throw DimensionError("qpca weight must be o x o");
    if (!opt.weight.isApprox(opt.weight.transpose(), 1e-12))
        throw InvalidArgumentError("qpca weight must be symmetric");
    Eigen::LLT<Mat> llt(opt.weight);
    if (llt.info() != Eigen::Success) throw InvalidArgumentError("qpca weight must be positive definite");
    return llt.matrixU();
}

}  // namespace detail

/// Box-constrained weighted least squares
///   min 1/2 ||B u - nu||_W^2 + lambda ||u - u_ref||^2,  lo <= u <= hi,
/// posed as a stacked bounded-variable least-squares problem.
inline AllocationResult qpca(const EffectivenessMatrix& bm, const Vec& nu, const ActuatorLimits& limits,
                             const ActuatorState& state, const QpcaOptions& opt = {}) {
    detail::Stopwatch clock;
    const Mat& b = bm.matrix();
    detail::check_problem(b, nu);
    detail::check_limits(b, limits, state);
    if (!(opt.reg_lambda >= 0.0)) throw InvalidArgumentError("reg_lambda must be >= 0");
    const int o = static_cast<int>(b.rows());
    const int m = static_cast<int>(b.cols());
    const Vec u_ref = opt.u_ref.size() == 0 ? Vec::Zero(m) : opt.u_ref;
    if (u_ref.size() != m) throw DimensionError("u_ref length does not match effector count");
    const Mat r = detail::weight_factor(opt, o);
    const EffectiveBounds bounds = effective_bounds(limits, state);

    const double mu = std::sqrt(2.0 * opt.reg_lambda);
    const int rows = opt.reg_lambda > 0.0 ? o + m : o;
    Mat a(rows, m);
    Vec rhs(rows);
    a.topRows(o) = r * b;
    rhs.head(o) = r * nu;
    if (opt.reg_lambda > 0.0) {
        a.bottomRows(m) = mu * Mat::Identity(m, m);
        rhs.tail(m) = mu * u_ref;
    }
    const auto sol = solve_box_lsq(a, rhs, bounds.lo, bounds.hi, 10 * m * rows, opt.rank_tol);
    Vec u = sol.x;

    if (opt.polish && opt.reg_lambda > 0.0) {
        // lambda -> 0+ on the final face: min ||u_F - u_ref,F|| among best fits.
        int idx[kMaxDim];
        int nf = 0;
        for (int i = 0; i < m; ++i)
            if (u(i) > bounds.lo(i) && u(i) < bounds.hi(i)) idx[nf++] = i;
        if (nf > 0) {
            Mat bf(o, nf);
            Vec xf(nf);
            Vec rf(nf);
            for (int k = 0; k < nf; ++k) {
                bf.col(k) = b.col(idx[k]);
                xf(k) = u(idx[k]);
                rf(k) = u_ref(idx[k]);
            }
            const Vec target = r * (nu - b * u + bf * xf - bf * rf);
            const Vec zf = rf + pinv(r * bf, opt.rank_tol) * target;
            Vec cand = u;
            for (int k = 0; k < nf; ++k) cand(idx[k]) = zf(k);
            if (is_feasible(cand, bounds, 1e-12) &&
                (r * (b * cand - nu)).norm() <= (r * (b * u - nu)).norm())
                u = clamp(cand, bounds);
        }
    }
    auto res = detail::finish(b, nu, u, sol.pivots);
    res.elapsed = clock.seconds();
    return res;
}

}  // namespace ccalloc
