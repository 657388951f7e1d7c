#pragma once

#include <vector>

#include "ccalloc/linalg.hpp"

namespace ccalloc {

/// B_C: rows of B with effector columns zeroed according to the sign of each
/// axis of delta_nu. Effector order: upper-left, upper-right, lower-left, lower-right.
struct ConditionalizedMap {
    Mat rows;
};

inline ConditionalizedMap conditionalize(const Mat& b, const Vec& delta_nu) {
    if (b.rows() != 3 || b.cols() != 4)
        throw DimensionError("conditionalization needs a 3x4 effectiveness matrix");
    if (delta_nu.size() != 3) throw DimensionError("delta_nu must have 3 components");
    // kept[axis][sign]: columns retained, sign 0 for >= 0, 1 for < 0
    static constexpr bool kept[3][2][4] = {
        {{false, true, true, false}, {true, false, false, true}},   // roll
        {{true, true, false, false}, {false, false, true, true}},   // pitch
        {{false, true, false, true}, {true, false, true, false}},   // yaw
    };
    ConditionalizedMap c{Mat::Zero(3, 4)};
    for (int axis = 0; axis < 3; ++axis) {
        const int sign = delta_nu(axis) >= 0.0 ? 0 : 1;
        for (int j = 0; j < 4; ++j)
            if (kept[axis][sign][j]) c.rows(axis, j) = b(axis, j);
    }
    return c;
}

/// u_s = u_r + B_C^+ delta_nu. A preference target, not necessarily feasible.
inline Vec steady_state_target(const Mat& b, const Vec& u_r, const Vec& delta_nu,
                               double rank_tol = kDefaultRankTol) {
    if (u_r.size() != b.cols()) throw DimensionError("u_r length does not match effector count");
    // pinv([A 0]) = [pinv(A); 0]: solving on the kept columns only keeps the
    // dropped components exactly zero instead of SVD round-off.
    const Mat bs = conditionalize(b, delta_nu).rows;
    std::vector<Eigen::Index> kept;
    for (Eigen::Index j = 0; j < bs.cols(); ++j)
        if (!bs.col(j).isZero(0.0)) kept.push_back(j);
    Vec du = Vec::Zero(b.cols());
    if (kept.empty()) return u_r;
    Mat sub(bs.rows(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t k = 0; k < kept.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = bs.col(kept[k]);
    const Vec z = pinv(sub, rank_tol) * delta_nu;
    for (std::size_t k = 0; k < kept.size(); ++k) du(kept[k]) = z(static_cast<Eigen::Index>(k));
    return u_r + du;
}

}  // namespace ccalloc
