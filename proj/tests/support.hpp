#pragma once

#include <algorithm>
#include <random>

#include "ccalloc/core.hpp"
#include "oracle.hpp"

namespace testing_support {

inline ccalloc::Mat ghgv2() { return oracle::ghgv2_b(); }

inline ccalloc::Vec ghgv2_nu() {
    ccalloc::Vec nu(3);
    nu << -400, 800, -2000;
    return nu;
}

inline ccalloc::Vec vec(std::initializer_list<double> xs) {
    ccalloc::Vec v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

inline ccalloc::ActuatorLimits box(int m, double lo, double hi) {
    return ccalloc::ActuatorLimits::box(ccalloc::Vec::Constant(m, lo), ccalloc::Vec::Constant(m, hi));
}

inline ccalloc::ActuatorState rest(int m) { return ccalloc::ActuatorState::at_rest(ccalloc::Vec::Zero(m)); }

/// Random instance generator: B, limits with both signs, states near the box.
struct Random {
    std::mt19937_64 rng;
    explicit Random(std::uint64_t seed) : rng(seed) {}

    double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }
    int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); }

    ccalloc::Mat matrix(int rows, int cols, double scale = 1.0) {
        ccalloc::Mat m(rows, cols);
        std::normal_distribution<double> n(0.0, scale);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = n(rng);
        return m;
    }

    ccalloc::Vec vector(int n, double a, double b) {
        ccalloc::Vec v(n);
        for (int i = 0; i < n; ++i) v(i) = uniform(a, b);
        return v;
    }

    ccalloc::ActuatorLimits limits(int m) {
        ccalloc::ActuatorLimits l;
        l.u_min.resize(m);
        l.u_max.resize(m);
        l.rate_min.resize(m);
        l.rate_max.resize(m);
        for (int i = 0; i < m; ++i) {
            // u_max stays positive: the drag weighting rejects negative upper limits.
            l.u_min(i) = uniform(-20, 10);
            l.u_max(i) = std::max(l.u_min(i), 0.0) + uniform(0.5, 25.0);
            l.rate_min(i) = -uniform(1.0, 100.0);
            l.rate_max(i) = uniform(1.0, 100.0);
        }
        return l;
    }

    ccalloc::ActuatorState state(const ccalloc::ActuatorLimits& l, double dt = 0.01) {
        const int m = l.size();
        ccalloc::ActuatorState s{ccalloc::Vec(m), ccalloc::Vec(m), dt};
        for (int i = 0; i < m; ++i) {
            s.u_prev(i) = uniform(l.u_min(i) - 1.0, l.u_max(i) + 1.0);
            s.u_prev2(i) = s.u_prev(i) - uniform(l.rate_min(i), l.rate_max(i)) * dt;
        }
        return s;
    }
};

}  // namespace testing_support
