#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace ccalloc {

// Upper bound on any matrix dimension. Covers m <= 16 effectors, o <= 8 axes
// and the stacked (o + m) x m least-squares system used by qpca.
inline constexpr int kMaxDim = 32;
inline constexpr int kMaxEffectors = 16;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;
using Mask = Eigen::Array<bool, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

inline constexpr double kDefaultRankTol = 1e-12;
inline constexpr double kDefaultFeasibilityTol = 1e-9;
inline constexpr double kDefaultDt = 0.01;
// |u - bound| below this counts as sitting on the bound.
inline constexpr double kSaturationTol = 1e-12;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class DegenerateWeightsError : public Error {
public:
    using Error::Error;
};

class DegenerateLimitsError : public Error {
public:
    using Error::Error;
};

// Raised by the active-set solvers when the pivot budget runs out.
class IterationLimitError : public Error {
public:
    using Error::Error;
};

class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

template <class Derived>
bool all_finite(const Eigen::DenseBase<Derived>& x) {
    return x.derived().array().isFinite().all();
}

inline Vec constant_vec(int n, double value) { return Vec::Constant(n, value); }

/// Control-effectiveness matrix B (o x m), checked on construction.
class EffectivenessMatrix {
public:
    EffectivenessMatrix() = default;

    explicit EffectivenessMatrix(const Mat& b) : b_(b) {
        if (b_.rows() < 1 || b_.cols() < b_.rows())
            throw DimensionError("effectiveness matrix must be o x m with 1 <= o <= m, got " +
                                 std::to_string(b_.rows()) + "x" + std::to_string(b_.cols()));
        if (b_.cols() > kMaxEffectors)
            throw DimensionError("at most " + std::to_string(kMaxEffectors) + " effectors supported");
        if (!all_finite(b_))
            throw InvalidArgumentError("effectiveness matrix has non-finite entries");
    }

    const Mat& matrix() const { return b_; }
    int axes() const { return static_cast<int>(b_.rows()); }
    int effectors() const { return static_cast<int>(b_.cols()); }

private:
    Mat b_;
};

}  // namespace ccalloc
