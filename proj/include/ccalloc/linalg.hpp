#pragma once

#include <Eigen/SVD>

#include "ccalloc/types.hpp"

namespace ccalloc {

/// Moore-Penrose pseudoinverse via SVD. Singular values at or below
/// rank_tol * sigma_max are treated as zero; a zero matrix maps to zero.
inline Mat pinv(const Mat& a, double rank_tol = kDefaultRankTol) {
    Mat out = Mat::Zero(a.cols(), a.rows());
    if (a.size() == 0) return out;
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || !(s(0) > 0.0)) return out;
    const double cutoff = rank_tol * s(0);
    for (Eigen::Index k = 0; k < s.size(); ++k) {
        if (s(k) <= cutoff) break;  // sorted descending
        out.noalias() += (svd.matrixV().col(k) / s(k)) * svd.matrixU().col(k).transpose();
    }
    return out;
}

inline int numerical_rank(const Mat& a, double rank_tol = kDefaultRankTol) {
    if (a.size() == 0) return 0;
    Eigen::JacobiSVD<Mat> svd(a);
    const auto& s = svd.singularValues();
    if (s.size() == 0 || !(s(0) > 0.0)) return 0;
    int r = 0;
    for (Eigen::Index k = 0; k < s.size(); ++k)
        if (s(k) > rank_tol * s(0)) ++r;
    return r;
}

/// Gains of the weighted linear-filter allocation u = E u_s + F u_prev + G nu.
struct LinearFilterGains {
    Mat E;
    Mat F;
    Mat G;
};

/// W = sqrt(W_m^2 + W_r^2), G = W^-1 (B W^-1)^+, E = (I - G B) W^-2 W_m^2,
/// F = (I - G B) W^-2 W_r^2. Weights are passed as their diagonals.
inline LinearFilterGains filter_gains(const Mat& b, const Vec& w_m, const Vec& w_r,
                                      double rank_tol = kDefaultRankTol) {
    const auto m = b.cols();
    if (w_m.size() != m || w_r.size() != m)
        throw DimensionError("weight diagonals must have one entry per effector");
    if ((w_m.array() < 0.0).any() || (w_r.array() < 0.0).any())
        throw DegenerateWeightsError("weights must be nonnegative");
    const Vec w2 = w_m.cwiseAbs2() + w_r.cwiseAbs2();
    if (!(w2.array() > 0.0).all() || !all_finite(w2))
        throw DegenerateWeightsError("combined weight W has a non-positive diagonal entry");
    const Vec w_inv = w2.cwiseSqrt().cwiseInverse();

    LinearFilterGains g;
    g.G = w_inv.asDiagonal() * pinv(b * w_inv.asDiagonal(), rank_tol);
    Mat igb = -g.G * b;
    igb.diagonal().array() += 1.0;
    g.E = igb * w_m.cwiseAbs2().cwiseQuotient(w2).asDiagonal();
    g.F = igb * w_r.cwiseAbs2().cwiseQuotient(w2).asDiagonal();
    return g;
}

}  // namespace ccalloc
