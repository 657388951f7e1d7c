#pragma once

#include <chrono>

#include "ccalloc/core.hpp"

namespace ccalloc {

struct AllocationResult {
    Vec u;
    Vec achieved;  // B u
    Vec residual;  // nu - B u
    double cost = 0.0;
    int iterations = 0;
    double elapsed = 0.0;  // seconds

    double error() const { return residual.norm(); }
};

namespace detail {

inline AllocationResult finish(const Mat& b, const Vec& nu, const Vec& u, int iterations) {
    AllocationResult r;
    r.u = u;
    r.achieved = b * u;
    r.residual = nu - r.achieved;
    r.cost = u.norm();
    r.iterations = iterations;
    return r;
}

class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

inline void check_problem(const Mat& b, const Vec& nu) {
    if (nu.size() != b.rows())
        throw DimensionError("virtual command has " + std::to_string(nu.size()) + " axes, B has " +
                             std::to_string(b.rows()));
    if (!all_finite(nu)) throw InvalidArgumentError("virtual command has non-finite entries");
}

inline void check_limits(const Mat& b, const ActuatorLimits& limits, const ActuatorState& state) {
    if (limits.size() != b.cols()) throw DimensionError("limits length does not match effector count");
    limits.validate();
    state.validate(static_cast<int>(b.cols()));
}

}  // namespace detail
}  // namespace ccalloc
