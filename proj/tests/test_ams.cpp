#include <gtest/gtest.h>

#include <map>
#include <set>

#include "ccalloc/ams.hpp"
#include "support.hpp"

using namespace ccalloc;
using testing_support::vec;

namespace {

EffectiveBounds box4(double lo, double hi) { return {Vec::Constant(4, lo), Vec::Constant(4, hi)}; }

/// Largest signed distance of any point beyond any facet plane.
double worst_outside(const MomentSet& ms) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& f : ms.hull_facets) {
        const Eigen::Vector3d a = ms.vertices[f[0]], b = ms.vertices[f[1]], c = ms.vertices[f[2]];
        const Eigen::Vector3d n = (b - a).cross(c - a).normalized();
        for (const auto& v : ms.vertices) worst = std::max(worst, n.dot(Eigen::Vector3d(v) - a));
    }
    return worst;
}

}  // namespace

TEST(MomentSet, ToyInterval) {
    const Mat b = (Mat(1, 2) << 0.5, -0.5).finished();
    const auto ms = moment_set(b, {vec({0, 0}), vec({1.5, 1.5})});
    ASSERT_EQ(ms.vertices.size(), 4u);
    EXPECT_DOUBLE_EQ(ms.lower(0), -0.75);
    EXPECT_DOUBLE_EQ(ms.upper(0), 0.75);
    EXPECT_TRUE(ms.hull_facets.empty());
}

TEST(MomentSet, GhgvMaxPitch) {
    const Mat b = testing_support::ghgv2();
    const auto ms = moment_set(b, box4(0, 20));
    // Oracle: the independent enumeration, searched for the pitch maximum.
    const auto images = oracle::corner_images(b, Eigen::VectorXd::Zero(4), Eigen::VectorXd::Constant(4, 20));
    ASSERT_EQ(ms.vertices.size(), images.size());
    std::size_t arg = 0;
    for (std::size_t k = 0; k < images.size(); ++k) {
        EXPECT_LE((ms.vertices[k] - Vec(images[k])).norm(), 1e-12);
        if (images[k](1) > images[arg](1)) arg = k;
    }
    EXPECT_EQ(arg, 3u);  // u = [20, 20, 0, 0]
    EXPECT_NEAR(ms.upper(1), 5068.0, 1e-9);
}

TEST(MomentSet, ZeroWidthBoxIsPoint) {
    const Mat b = testing_support::ghgv2();
    const Vec lo = vec({1, 2, 3, 4});
    const auto ms = moment_set(b, {lo, lo});
    for (const auto& v : ms.vertices) EXPECT_EQ(v, b * lo);
    EXPECT_TRUE(ms.hull_facets.empty());
    EXPECT_TRUE(ms.half_extent().isZero(0.0));
}

TEST(MomentSet, GhgvHullIsConvexAndClosed) {
    const auto ms = moment_set(testing_support::ghgv2(), box4(0, 20));
    ASSERT_FALSE(ms.hull_facets.empty());
    double scale = 0.0;
    for (const auto& v : ms.vertices) scale = std::max(scale, v.cwiseAbs().maxCoeff());
    EXPECT_LE(worst_outside(ms), 1e-9 * scale);
    // Closed triangulated surface: every directed edge has its reverse.
    std::map<std::pair<int, int>, int> edges;
    for (const auto& f : ms.hull_facets)
        for (int k = 0; k < 3; ++k) ++edges[{f[k], f[(k + 1) % 3]}];
    for (const auto& [e, n] : edges) {
        EXPECT_EQ(n, 1);
        EXPECT_EQ(edges.count({e.second, e.first}), 1u);
    }
    // Euler characteristic of a sphere.
    std::set<int> used;
    for (const auto& f : ms.hull_facets) used.insert(f.begin(), f.end());
    EXPECT_EQ(static_cast<long>(used.size()) - static_cast<long>(edges.size() / 2) +
                  static_cast<long>(ms.hull_facets.size()),
              2);
}

TEST(MomentSet, RandomHullsContainAllVertices) {
    testing_support::Random rnd(71);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = rnd.integer(3, 7);
        const Mat b = rnd.matrix(3, m, 10.0);
        const auto l = rnd.limits(m);
        const auto ms = moment_set(b, {l.u_min, l.u_max});
        double scale = 0.0;
        for (const auto& v : ms.vertices) scale = std::max(scale, v.cwiseAbs().maxCoeff());
        ASSERT_FALSE(ms.hull_facets.empty());
        ASSERT_LE(worst_outside(ms), 1e-9 * scale) << trial;
    }
}

TEST(MomentSet, DimensionChecks) {
    EXPECT_THROW(moment_set(testing_support::ghgv2(), {Vec::Zero(3), Vec::Ones(3)}), DimensionError);
    EXPECT_THROW(moment_set(Mat::Ones(3, 17), {Vec::Zero(17), Vec::Ones(17)}), DimensionError);
}

TEST(Contains, Examples) {
    const Mat b = testing_support::ghgv2();
    const auto box = box4(0, 20);
    EXPECT_TRUE(contains(b, box, testing_support::ghgv2_nu()));
    EXPECT_FALSE(contains(b, box, 1.01 * (b * vec({20, 20, 0, 0}))));
    EXPECT_TRUE(contains(b, box, b * Vec::Constant(4, 10)));
    EXPECT_THROW(contains(b, box, Vec::Zero(3), 0.0), InvalidArgumentError);
}

TEST(Contains, ImagesOfBoxPointsAreInside) {
    testing_support::Random rnd(72);
    const Mat b = testing_support::ghgv2();
    const auto box = box4(0, 20);
    for (int k = 0; k < 10000; ++k) {
        const Vec u = rnd.vector(4, 0, 20);
        ASSERT_TRUE(contains(b, box, b * u)) << k;
    }
}

TEST(Contains, SymmetricBoxIsCentrallySymmetric) {
    testing_support::Random rnd(73);
    const Mat b = testing_support::ghgv2();
    const auto box = box4(-20, 20);
    int inside = 0;
    for (int k = 0; k < 2000; ++k) {
        const Vec nu = rnd.vector(3, -12000, 12000);
        const bool in = contains(b, box, nu);
        inside += in;
        ASSERT_EQ(in, contains(b, box, -nu)) << k;
    }
    EXPECT_GT(inside, 0);
}
