#include <gtest/gtest.h>

#include "ccalloc/steady_state.hpp"
#include "support.hpp"

using namespace ccalloc;
using testing_support::vec;

namespace {

// Columns kept per axis, written out directly from the sign rules (0-based).
Eigen::MatrixXd conditioned_by_hand(const Eigen::MatrixXd& b, const Vec& dnu) {
    const int roll_pos[] = {1, 2}, roll_neg[] = {0, 3};
    const int pitch_pos[] = {0, 1}, pitch_neg[] = {2, 3};
    const int yaw_pos[] = {1, 3}, yaw_neg[] = {0, 2};
    const int* keep[3] = {dnu(0) >= 0 ? roll_pos : roll_neg, dnu(1) >= 0 ? pitch_pos : pitch_neg,
                          dnu(2) >= 0 ? yaw_pos : yaw_neg};
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(3, 4);
    for (int r = 0; r < 3; ++r)
        for (int k = 0; k < 2; ++k) c(r, keep[r][k]) = b(r, keep[r][k]);
    return c;
}

}  // namespace

TEST(Conditionalize, PositivePitchKeepsUpperFlaps) {
    const Mat b = testing_support::ghgv2();
    const auto c = conditionalize(b, vec({0, 800, 0}));
    EXPECT_EQ(c.rows(1, 0), b(1, 0));
    EXPECT_EQ(c.rows(1, 1), b(1, 1));
    EXPECT_EQ(c.rows(1, 2), 0.0);
    EXPECT_EQ(c.rows(1, 3), 0.0);
}

TEST(Conditionalize, NegativeBranches) {
    const Mat b = testing_support::ghgv2();
    const auto c = conditionalize(b, vec({-1, -1, -1}));
    const Eigen::Array<bool, 3, 4> expect_kept =
        (Eigen::Array<bool, 3, 4>() << true, false, false, true,  //
         false, false, true, true,                                //
         true, false, true, false)
            .finished();
    for (int r = 0; r < 3; ++r)
        for (int j = 0; j < 4; ++j) EXPECT_EQ(c.rows(r, j) != 0.0, expect_kept(r, j)) << r << "," << j;
}

TEST(Conditionalize, SignFlipGivesComplement) {
    const Mat b = testing_support::ghgv2();
    testing_support::Random rnd(41);
    for (int trial = 0; trial < 100; ++trial) {
        Vec d = rnd.vector(3, -100, 100);
        const auto a = conditionalize(b, d);
        const auto c = conditionalize(b, -d);
        ASSERT_TRUE((a.rows + c.rows).isApprox(b));
        ASSERT_TRUE((a.rows.array() * c.rows.array()).isZero(0.0));
    }
}

TEST(Conditionalize, NeedsThreeByFour) {
    EXPECT_THROW(conditionalize(Mat::Ones(3, 5), vec({1, 1, 1})), DimensionError);
    EXPECT_THROW(conditionalize(Mat::Ones(2, 4), vec({1, 1})), DimensionError);
}

TEST(SteadyState, ZeroDeltaReturnsBaseline) {
    const Vec u_r = vec({1, 2, 3, 4});
    EXPECT_EQ(steady_state_target(testing_support::ghgv2(), u_r, Vec::Zero(3)), u_r);
}

TEST(SteadyState, MatchesIndependentPseudoinverse) {
    const Eigen::MatrixXd b = oracle::ghgv2_b();
    for (const Vec& d : {vec({0, 800, 0}), vec({0, -800, 0}), vec({-400, 800, -2000}), vec({15, -3, 7})}) {
        const Eigen::VectorXd expect = oracle::pinv(conditioned_by_hand(b, d)) * Eigen::VectorXd(d);
        const Vec got = steady_state_target(testing_support::ghgv2(), Vec::Zero(4), d);
        EXPECT_LE((Eigen::VectorXd(got) - expect).norm(), 1e-10 * (1.0 + expect.norm()));
    }
}

TEST(SteadyState, PitchExamplesNumeric) {
    // Values from the oracle; with zero roll/yaw every column stays in play.
    const Vec up = steady_state_target(testing_support::ghgv2(), Vec::Zero(4), vec({0, 800, 0}));
    const Vec down = steady_state_target(testing_support::ghgv2(), Vec::Zero(4), vec({0, -800, 0}));
    const Eigen::VectorXd up_ref = oracle::pinv(conditioned_by_hand(oracle::ghgv2_b(), vec({0, 800, 0}))) *
                                   Eigen::Vector3d(0, 800, 0);
    const Eigen::VectorXd down_ref = oracle::pinv(conditioned_by_hand(oracle::ghgv2_b(), vec({0, -800, 0}))) *
                                     Eigen::Vector3d(0, -800, 0);
    EXPECT_NEAR(up_ref(0), 5.649, 1e-3);
    EXPECT_NEAR(down_ref(0), 0.0, 1e-12);
    EXPECT_LE((Eigen::VectorXd(up) - up_ref).norm(), 1e-10);
    EXPECT_LE((Eigen::VectorXd(down) - down_ref).norm(), 1e-10);
}

TEST(SteadyState, SupportAndOrthantLinearity) {
    const Mat b = testing_support::ghgv2();
    testing_support::Random rnd(42);
    for (int trial = 0; trial < 500; ++trial) {
        const Vec d = rnd.vector(3, -1000, 1000);
        const auto c = conditionalize(b, d);
        const Vec du = steady_state_target(b, Vec::Zero(4), d);
        for (int j = 0; j < 4; ++j)
            if (c.rows.col(j).isZero(0.0)) {
                ASSERT_EQ(du(j), 0.0);
            }
        // same sign pattern: linear
        const double s = rnd.uniform(0.1, 5.0);
        const Vec d2 = rnd.vector(3, 0, 1000).cwiseProduct(d.cwiseSign());
        const Vec lhs = steady_state_target(b, Vec::Zero(4), s * d + d2);
        const Vec rhs = s * du + steady_state_target(b, Vec::Zero(4), d2);
        ASSERT_LE((lhs - rhs).norm(), 1e-9 * (1.0 + lhs.norm()));
    }
}
