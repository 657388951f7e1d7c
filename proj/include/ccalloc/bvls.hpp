#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "ccalloc/linalg.hpp"

namespace ccalloc {

struct BoxLsqResult {
    Vec x;
    double residual_norm = 0.0;
    int pivots = 0;
    bool kkt_certified = false;
};

/// Bounded-variable least squares, min ||A x - b|| s.t. lo <= x <= hi.
///
/// Active-set method in the Stark-Parker style: free variables are solved by a
/// min-norm pseudoinverse, infeasible steps are cut back to the first bound
/// hit, and the entering variable is the lowest-index KKT violator (Bland),
/// which rules out cycling. Throws IterationLimitError once more than
/// max_pivots active-set changes have been made.
inline BoxLsqResult solve_box_lsq(const Mat& a, const Vec& b, const Vec& lo, const Vec& hi,
                                  int max_pivots, double rank_tol = kDefaultRankTol) {
    enum : unsigned char { kLower, kUpper, kFree };
    const int n = static_cast<int>(a.cols());
    if (b.size() != a.rows() || lo.size() != n || hi.size() != n)
        throw DimensionError("box least squares: inconsistent dimensions");
    if (((lo.array() > hi.array()) || lo.array().isNaN() || hi.array().isNaN()).any())
        throw DegenerateLimitsError("box least squares: lo > hi");

    BoxLsqResult res;
    Vec& x = res.x;
    x = Vec::Zero(n).cwiseMax(lo).cwiseMin(hi);
    Eigen::Array<unsigned char, Eigen::Dynamic, 1, 0, kMaxDim, 1> state(n);
    for (int i = 0; i < n; ++i)
        state(i) = (x(i) > lo(i) && x(i) < hi(i)) ? kFree : (x(i) == lo(i) ? kLower : kUpper);

    Vec col_norm(n);
    for (int i = 0; i < n; ++i) col_norm(i) = a.col(i).norm();
    const double a_norm = a.norm();

    auto count_pivot = [&] {
        if (++res.pivots > max_pivots)
            throw IterationLimitError("box least squares exceeded " + std::to_string(max_pivots) +
                                      " pivots");
    };

    // Solves the free subproblem, cutting steps back to the bounds. Returns
    // false if `entering` immediately wants to leave through its own bound.
    auto solve_free = [&](int entering, unsigned char from) -> bool {
        for (;;) {
            int idx[kMaxDim];
            int nf = 0;
            for (int i = 0; i < n; ++i)
                if (state(i) == kFree) idx[nf++] = i;
            if (nf == 0) return true;
            Mat af(a.rows(), nf);
            Vec xf(nf);
            for (int k = 0; k < nf; ++k) {
                af.col(k) = a.col(idx[k]);
                xf(k) = x(idx[k]);
            }
            const Vec rhs = b - a * x + af * xf;
            const Vec z = pinv(af, rank_tol) * rhs;

            double alpha = 1.0;
            for (int k = 0; k < nf; ++k) {
                const int i = idx[k];
                if (i == entering && ((from == kLower && z(k) < lo(i)) || (from == kUpper && z(k) > hi(i))))
                    return false;
                if (z(k) < lo(i)) alpha = std::min(alpha, (lo(i) - xf(k)) / (z(k) - xf(k)));
                if (z(k) > hi(i)) alpha = std::min(alpha, (hi(i) - xf(k)) / (z(k) - xf(k)));
            }
            entering = -1;
            if (alpha >= 1.0) {
                for (int k = 0; k < nf; ++k) x(idx[k]) = z(k);
                return true;
            }
            alpha = std::max(alpha, 0.0);
            for (int k = 0; k < nf; ++k) {
                const int i = idx[k];
                const double step = xf(k) + alpha * (z(k) - xf(k));
                if (z(k) < lo(i) && step <= lo(i) + kSaturationTol * (1.0 + std::abs(lo(i)))) {
                    x(i) = lo(i);
                    state(i) = kLower;
                } else if (z(k) > hi(i) && step >= hi(i) - kSaturationTol * (1.0 + std::abs(hi(i)))) {
                    x(i) = hi(i);
                    state(i) = kUpper;
                } else {
                    x(i) = std::clamp(step, lo(i), hi(i));
                }
            }
            count_pivot();
        }
    };

    solve_free(-1, kFree);
    Mask skip = Mask::Constant(n, false);
    for (;;) {
        const Vec r = b - a * x;
        const Vec w = a.transpose() * r;  // negative gradient
        const double scale = std::max(b.norm(), a_norm * x.norm());
        int entering = -1;
        for (int i = 0; i < n; ++i) {
            if (state(i) == kFree || skip(i) || lo(i) == hi(i)) continue;
            const double tol = 1e-12 * col_norm(i) * scale + 1e-300;
            if ((state(i) == kLower && w(i) > tol) || (state(i) == kUpper && w(i) < -tol)) {
                entering = i;
                break;
            }
        }
        if (entering < 0) {
            res.kkt_certified = !skip.any();
            break;
        }
        count_pivot();
        const Vec x_before = x;
        const auto state_before = state;
        state(entering) = kFree;
        if (!solve_free(entering, state_before(entering))) {
            x = x_before;
            state = state_before;
            skip(entering) = true;
            continue;
        }
        skip.setConstant(false);
    }
    res.residual_norm = (a * x - b).norm();
    return res;
}

}  // namespace ccalloc
